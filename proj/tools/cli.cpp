#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "definetti/chains.hpp"
#include "definetti/io.hpp"
#include "definetti/moments.hpp"
#include "definetti/pcoh.hpp"

namespace definetti::cli {

namespace {

using io::json;

namespace anchor {
const char* squares = "draw-and-delete chain can be built";
const char* multinomial = "induces a canonical chain morphism";
const char* equaliser = "is an equalizer of the symmetries";
const char* stoch_equaliser = "respectively the equalizer and coequalizer";
const char* limit = "The draw-and-delete chain has a limit";
const char* tensor = "equalisers of symmetries commute with the tensor product";
const char* definetti_limit = "has $\\mathcal G X$ as limit";
const char* totality = "it holds that $u_{\\mu} = \\sum_{x\\in X}u_{(\\mu +[x])}$";
const char* damped = "refuses to answer with probability";
const char* recover = "exactly the continuous mixtures of promotions";
}  // namespace anchor

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string alphabet_file;
  std::size_t depth = 4;
  std::size_t grid = 64;
  std::string tol;
  std::uint64_t seed = 1;
  std::string mode = "exact";
  std::string out;
  std::size_t trials = 10000;
  std::size_t prefix_len = 1000;
  std::size_t workers = 0;
  std::string input;
  std::string backend = "stoch";
  bool inject_fault = false;
};

Alphabet load_alphabet(const Config& c) {
  if (c.alphabet_file.empty()) return Alphabet({"t", "f"});
  return io::alphabet_from_json(io::read_json_file(c.alphabet_file));
}

// Named alphabet from --alphabet, else {t,f} for two letters, else s0..s(k-1).
Alphabet alphabet_for(const Config& c, std::size_t k) {
  if (!c.alphabet_file.empty()) {
    auto a = load_alphabet(c);
    if (a.size() != k) throw InputError("alphabet size does not match the mixing measure");
    return a;
  }
  return k == 2 ? Alphabet({"t", "f"}) : Alphabet::of_size(k);
}

Rational tolerance(const Config& c, const char* fallback) {
  const std::string text = c.tol.empty() ? fallback : c.tol;
  Rational t;
  try {
    t = parse_rational(text);
  } catch (const std::exception& e) {
    throw InputError("bad tolerance '" + text + "': " + e.what());
  }
  if (t <= 0) throw InputError("tolerance must be positive");
  return t;
}

moments::Mode mode_of(const Config& c) { return c.mode == "exact" ? moments::Mode::exact : moments::Mode::floating; }

std::size_t workers_of(const Config& c) {
  if (c.workers > 0) return c.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void emit(const Config& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw InputError("cannot write " + c.out);
  f << text;
}

void emit_json(const Config& c, const json& j, std::ostream& out) { emit(c, j.dump(2) + "\n", out); }

void print_failures(const Report& report, std::ostream& err) {
  for (const auto& r : report)
    if (!r.passed) {
      err << "FAILED " << r.check;
      if (r.level) err << " level " << *r.level;
      err << " deviation " << to_string(r.deviation);
      if (r.witness) err << " (" << *r.witness << ")";
      err << "\n";
    }
}

chains::CopointedObject object_for(const std::string& backend, const Alphabet& a) {
  if (backend == "stoch") return chains::stoch_free(a);
  if (backend == "pcoh-definetti") return chains::pcoh_definetti(a);
  if (backend == "pcoh-free") return chains::pcoh_free(a);
  throw InputError("unknown backend '" + backend + "'");
}

// ---------------------------------------------------------------------------
// verify-all

void append(Report& into, const Report& more) { into.insert(into.end(), more.begin(), more.end()); }

void add_chain_checks(Report& report, const chains::CopointedObject& obj, std::size_t depth, bool fault,
                      std::optional<chains::DDChain>& built) {
  try {
    auto chain = chains::build_dd_chain(obj, depth);
    if (fault && depth > 0) {
      chain.dd[depth > 1 ? 1 : 0](0, 0) += 1;
    }
    append(report, chains::verify_chain(chain));
    built = std::move(chain);
  } catch (const chains::SquareError& e) {
    auto r = exact_check("dd_square/" + chains::to_string(obj.backend) + "/" + obj.name, anchor::squares, e.level,
                         e.deviation);
    r.witness = e.what();
    report.push_back(std::move(r));
  }
}

Report verify_all(const Config& c) {
  const Alphabet a = load_alphabet(c);
  const std::size_t k = a.size();
  const std::size_t depth = c.depth;
  const bool exact = c.mode == "exact";
  Report report;

  std::optional<chains::DDChain> stoch, definetti, free_chain;
  add_chain_checks(report, chains::stoch_free(a), depth, c.inject_fault, stoch);
  add_chain_checks(report, chains::pcoh_definetti(a), depth, false, definetti);
  add_chain_checks(report, chains::pcoh_free(a), depth, false, free_chain);

  for (auto* chain : {&stoch, &definetti, &free_chain}) {
    if (!*chain) continue;
    const QMatrix id = QMatrix::identity((*chain)->alphabet_size());
    const auto m = chains::lift_copointed_morphism(id, **chain, **chain);
    auto part = chains::verify_chain_morphism(m, id, **chain, **chain);
    for (auto& r : part) r.check = "identity_lift/" + (*chain)->object.name + "/" + r.check;
    append(report, part);
  }

  if (definetti && free_chain) {
    QMatrix alpha(k, k + 1);
    for (std::size_t x = 0; x < k; ++x) alpha(x, x) = 1, alpha(x, k) = 1;
    const auto m = chains::lift_copointed_morphism(alpha, *definetti, *free_chain);
    append(report, chains::verify_chain_morphism(m, alpha, *definetti, *free_chain));
    for (std::size_t n = 0; n <= depth; ++n)
      report.push_back(exact_check("mn_alpha_closed_form", anchor::multinomial, n,
                                   max_abs_deviation(m.components[n] * chains::unpadding_matrix(k, n),
                                                     pcoh::mn_alpha(a, n).entries)));
  }

  for (std::size_t n = 0; n <= depth + 1; ++n) {
    const auto eq = eq_n_stoch(a, n);
    const auto coeq = coeq_n_stoch(a, n);
    report.push_back(exact_check("stoch_eq_symmetric", anchor::stoch_equaliser, n, verify_equalises(eq, n).max_deviation));
    report.push_back(exact_check("coeq_after_eq_is_identity", anchor::stoch_equaliser, n,
                                 max_abs_deviation(eq.entries() * coeq.entries(), QMatrix::identity(eq.entries().rows()))));
    QMatrix average(coeq.entries().rows(), coeq.entries().rows());
    for (const auto& sigma : all_permutations(n)) average += symmetry_kernel(sigma, a, n).entries();
    average *= Rational(BigInt(1), factorial(n));
    report.push_back(exact_check("eq_after_coeq_is_average", anchor::stoch_equaliser, n,
                                 max_abs_deviation(coeq.entries() * eq.entries(), average)));
    report.push_back(exact_check("pcoh_eq_symmetric", anchor::equaliser, n,
                                 verify_equalises(pcoh::eq_n_pcoh(a, n).entries, k, n).max_deviation));
  }
  report.push_back(exact_check("coordinate_conjugation", anchor::equaliser, std::nullopt,
                               chains::conjugation_deviation(a, depth)));

  Rng rng = Rng::stream(c.seed, 0);
  for (auto* chain : {&stoch, &definetti, &free_chain}) {
    if (!*chain) continue;
    Rational worst = 0;
    for (int i = 0; i < 10; ++i) {
      const auto g = chains::random_dd_cone(**chain, 2, 1, rng);
      const auto back = chains::dagger_factorize(chains::omega_from_dd_cone(g, **chain), **chain);
      const auto f = chains::random_delete_cone(**chain, 2, 1, rng);
      const auto there = chains::omega_from_dd_cone(chains::dagger_factorize(f, **chain), **chain);
      for (std::size_t n = 0; n <= depth; ++n) {
        worst = std::max(worst, max_abs_deviation(back.legs[n], g.legs[n]));
        worst = std::max(worst, max_abs_deviation(there.legs[n], f.legs[n]));
      }
    }
    report.push_back(exact_check("cone_round_trips/" + (*chain)->object.name, anchor::limit, std::nullopt, worst));
    const auto tensor = chains::verify_tensor_parametrized(**chain, 2, 3, c.seed + 1);
    report.push_back(exact_check("parametrized_factorisation/" + (*chain)->object.name, anchor::tensor, std::nullopt,
                                 std::max(tensor.max_factor_deviation, tensor.max_roundtrip_deviation)));
  }

  // Random rational mixing with on-grid atoms (denominators dividing the grid).
  std::vector<Atom> atoms;
  for (int j = 0; j < 2; ++j) {
    std::vector<long> counts(k, 0);
    long left = 8;
    for (std::size_t x = 0; x + 1 < k; ++x) {
      counts[x] = static_cast<long>(rng.uniform() * (left + 1));
      left -= counts[x];
    }
    counts[k - 1] = left;
    std::vector<Rational> point;
    for (auto cnt : counts) point.emplace_back(cnt, 8);
    atoms.push_back({ProbVector(point), Rational(j == 0 ? 1 : 2, 3)});
  }
  const AtomicMeasure mixing(k, atoms);

  if (stoch) {
    const auto cone = chains::multkern_cone(mixing, *stoch);
    report.push_back(exact_check("multkern_cone", anchor::definetti_limit, std::nullopt, chains::cone_defect(cone, *stoch)));
  }
  append(report, moments::verify_iota_cone(mixing, a, depth));
  const auto b = moments::iota(mixing, a, depth);
  const auto total = moments::check_total(b);
  report.push_back(exact_check("iota_is_total", anchor::totality, std::nullopt, total.defect));

  const Rational p(1, 2);
  const auto damped = moments::check_total(damp(b, p));
  {
    auto r = exact_check("damped_defect", anchor::damped, std::nullopt, abs(damped.defect - (1 - p)));
    r.passed = r.passed && !damped.total;
    report.push_back(std::move(r));
  }

  const Rational tol = tolerance(c, "1/1000000");
  const auto rec = moments::recover_measure(b, 8, tol, mode_of(c));
  CheckResult r{"recover_after_iota", anchor::recover, std::nullopt, rec.residual, exact, rec.within_tolerance, std::nullopt};
  if (!rec.within_tolerance) r.witness = rec.diagnostic;
  report.push_back(std::move(r));
  return report;
}

// ---------------------------------------------------------------------------
// definetti simulate

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

int simulate(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.input.empty()) throw InputError("--mixing is required");
  const auto mixing = io::measure_from_json(io::read_json_file(c.input));
  if (!mixing.is_probability()) throw InputError("mixing measure must have total weight 1");
  if (c.prefix_len == 0 || c.trials == 0) throw InputError("--prefix-len and --trials must be positive");
  const std::size_t k = mixing.alphabet_size();
  const Alphabet a = alphabet_for(c, k);

  const auto law = empirical_law(mixing, c.prefix_len, c.trials, c.seed, workers_of(c));

  std::ostringstream hist;
  for (std::size_t x = 0; x < k; ++x) hist << "k_" << a.symbol(x) << ",";
  for (std::size_t x = 0; x < k; ++x) hist << "z_" << a.symbol(x) << ",";
  hist << "count,frequency\n";
  for (auto it = law.histogram.rbegin(); it != law.histogram.rend(); ++it) {
    for (auto cnt : it->first) hist << cnt << ",";
    for (auto cnt : it->first) hist << fixed(static_cast<double>(cnt) / static_cast<double>(c.prefix_len)) << ",";
    hist << it->second << "," << fixed(static_cast<double>(it->second) / static_cast<double>(c.trials)) << "\n";
  }

  std::ostringstream mom;
  mom << "symbol,order,mixing,empirical,abs_error\n";
  double worst = 0;
  for (std::size_t x = 0; x < k; ++x)
    for (std::size_t order = 1; order <= 3; ++order) {
      const double expected = mixing_moment(mixing, x, order);
      const double seen = law.moment(x, order);
      worst = std::max(worst, std::abs(seen - expected));
      mom << a.symbol(x) << "," << order << "," << fixed(expected) << "," << fixed(seen) << ","
          << fixed(std::abs(seen - expected)) << "\n";
    }

  if (c.out.empty()) {
    out << hist.str() << "\n" << mom.str();
  } else {
    emit(c, hist.str(), out);
    out << mom.str();
  }
  if (!c.tol.empty() && worst > to_double(tolerance(c, "0.02"))) {
    err << "moment error " << worst << " exceeds tolerance " << c.tol << "\n";
    return kVerificationFailure;
  }
  return kPass;
}

// ---------------------------------------------------------------------------
// definetti recover, bang iota, bang totality

BangElement load_bang(const Config& c) {
  if (c.input.empty()) throw InputError("--bang is required");
  return io::bang_from_json(io::read_json_file(c.input));
}

int recover(const Config& c, std::ostream& out, std::ostream& err) {
  const auto b = load_bang(c);
  const Rational tol = tolerance(c, "1/1000000");
  if (c.grid < 2) throw InputError("--grid must be at least 2");
  try {
    const auto rec = moments::recover_measure(b, c.grid, tol, mode_of(c));
    emit_json(c, io::recovery_to_json(rec), out);
    if (!rec.within_tolerance) {
      err << rec.diagnostic << "\n";
      return kVerificationFailure;
    }
    return kPass;
  } catch (const moments::NotTotal& e) {
    err << e.what() << "\n";
    return kVerificationFailure;
  }
}

int bang_iota(const Config& c, std::ostream& out, std::ostream& err) {
  if (c.input.empty()) throw InputError("--mixing is required");
  const auto mixing = io::measure_from_json(io::read_json_file(c.input));
  const Alphabet a = alphabet_for(c, mixing.alphabet_size());
  const auto b = moments::iota(mixing, a, c.depth);
  emit_json(c, io::bang_to_json(b), out);
  if (!mixing.is_probability()) err << "substochastic, not total\n";
  return kPass;
}

int bang_totality(const Config& c, std::ostream& out, std::ostream& err) {
  const auto b = load_bang(c);
  const auto report = moments::check_total(b, c.tol.empty() ? Rational(0) : tolerance(c, "0"));
  json j{{"total", report.total},
         {"defect", io::rational_to_json(report.defect)},
         {"normalisation", io::rational_to_json(report.normalisation)},
         {"anchor", anchor::totality}};
  if (!report.total) j["witness"] = report.witness.to_string(b.alphabet());
  emit_json(c, j, out);
  if (!report.total) {
    err << "not total: defect " << to_string(report.defect) << " at " << report.witness.to_string(b.alphabet());
    if (report.normalisation == 0 && b[Multiset::empty(b.alphabet().size())] <= 1) err << " (substochastic)";
    err << "\n";
    return kVerificationFailure;
  }
  return kPass;
}

// ---------------------------------------------------------------------------
// chain build, chain verify

int chain_build(const Config& c, std::ostream& out) {
  const auto obj = object_for(c.backend, load_alphabet(c));
  const auto chain = chains::build_dd_chain(obj, c.depth);
  json dd = json::array();
  for (std::size_t n = 0; n < chain.depth; ++n)
    dd.push_back(json{{"source", io::index_set_to_json(IndexSet::multisets(obj.carrier, n + 1))},
                      {"target", io::index_set_to_json(IndexSet::multisets(obj.carrier, n))},
                      {"rows", io::matrix_to_json(chain.dd[n])}});
  json eq = json::array();
  for (std::size_t n = 0; n <= chain.depth; ++n)
    eq.push_back(json{{"source", io::index_set_to_json(IndexSet::multisets(obj.carrier, n))},
                      {"target", io::index_set_to_json(IndexSet::tuples(obj.carrier, n))},
                      {"rows", io::matrix_to_json(chain.eq[n])}});
  emit_json(c,
            json{{"backend", chains::to_string(obj.backend)},
                 {"object", obj.name},
                 {"carrier", io::alphabet_to_json(obj.carrier)},
                 {"weaken", io::matrix_to_json(obj.weaken)},
                 {"depth", chain.depth},
                 {"dd", dd},
                 {"eq", eq}},
            out);
  return kPass;
}

int chain_verify(const Config& c, std::ostream& out, std::ostream& err) {
  const auto obj = object_for(c.backend, load_alphabet(c));
  Report report;
  std::optional<chains::DDChain> chain;
  add_chain_checks(report, obj, c.depth, c.inject_fault, chain);
  if (chain) {
    const auto tensor = chains::verify_tensor_parametrized(*chain, 2, 3, c.seed);
    report.push_back(exact_check("parametrized_factorisation/" + obj.name, anchor::tensor, std::nullopt,
                                 std::max(tensor.max_factor_deviation, tensor.max_roundtrip_deviation)));
  }
  emit_json(c, io::report_to_json(report), out);
  print_failures(report, err);
  return all_passed(report) ? kPass : kVerificationFailure;
}

// Wraps a command body with the input-error mapping.
template <class F>
int guarded(F f, std::ostream& err) {
  try {
    return f();
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const io::FormatError& e) {
    err << "input error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
  }
  return kInputError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"De Finetti chains, coherence spaces and the moment problem at finite truncation", "definetti"};
  app.require_subcommand(1);
  Config c;

  auto add_alphabet = [&](CLI::App* cmd) { cmd->add_option("--alphabet", c.alphabet_file, "alphabet JSON file"); };
  auto add_depth = [&](CLI::App* cmd) { cmd->add_option("--depth", c.depth, "truncation depth N"); };
  auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", c.out, "output path (default stdout)"); };
  auto add_tol = [&](CLI::App* cmd) { cmd->add_option("--tol", c.tol, "tolerance, e.g. 1e-6 or 1/1000"); };
  auto add_mode = [&](CLI::App* cmd) {
    cmd->add_option("--mode", c.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
  };
  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", c.seed, "random seed"); };

  auto* verify = app.add_subcommand("verify-all", "run the full property suite");
  add_alphabet(verify);
  add_depth(verify);
  add_mode(verify);
  add_seed(verify);
  add_tol(verify);
  add_out(verify);
  verify->add_flag("--inject-fault", c.inject_fault, "corrupt one DD entry (negative control)");

  auto* definetti = app.add_subcommand("definetti", "exchangeable sequences and mixing measures");
  definetti->require_subcommand(1);
  auto* simulate_cmd = definetti->add_subcommand("simulate", "empirical law of Z_n against the mixing measure");
  simulate_cmd->add_option("--mixing", c.input, "mixing measure JSON")->required();
  add_alphabet(simulate_cmd);
  simulate_cmd->add_option("--prefix-len", c.prefix_len, "prefix length n");
  simulate_cmd->add_option("--trials", c.trials, "number of simulated prefixes");
  simulate_cmd->add_option("--workers", c.workers, "worker threads (results do not depend on it)");
  add_seed(simulate_cmd);
  add_tol(simulate_cmd);
  add_out(simulate_cmd);
  auto* recover_cmd = definetti->add_subcommand("recover", "recover a mixing measure from a total element");
  recover_cmd->add_option("--bang", c.input, "bang element JSON")->required();
  recover_cmd->add_option("--grid", c.grid, "grid resolution g");
  add_tol(recover_cmd);
  add_mode(recover_cmd);
  add_out(recover_cmd);

  auto* bang = app.add_subcommand("bang", "elements of the truncated exponential");
  bang->require_subcommand(1);
  auto* iota_cmd = bang->add_subcommand("iota", "embed a mixing measure");
  iota_cmd->add_option("--mixing", c.input, "mixing measure JSON")->required();
  add_alphabet(iota_cmd);
  add_depth(iota_cmd);
  add_out(iota_cmd);
  auto* totality_cmd = bang->add_subcommand("totality", "check the totality recurrence");
  totality_cmd->add_option("--bang", c.input, "bang element JSON")->required();
  add_tol(totality_cmd);
  add_out(totality_cmd);

  auto* chain = app.add_subcommand("chain", "draw-and-delete chains");
  chain->require_subcommand(1);
  std::vector<CLI::App*> chain_cmds{chain->add_subcommand("build", "emit the DD and eq matrices"),
                                    chain->add_subcommand("verify", "check every defining square")};
  for (auto* cmd : chain_cmds) {
    cmd->add_option("--backend", c.backend, "stoch, pcoh-definetti or pcoh-free")
        ->check(CLI::IsMember({"stoch", "pcoh-definetti", "pcoh-free"}));
    add_alphabet(cmd);
    add_depth(cmd);
    add_seed(cmd);
    add_out(cmd);
  }
  chain_cmds[1]->add_flag("--inject-fault", c.inject_fault, "corrupt one DD entry (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  }

  if (*verify)
    return guarded(
        [&] {
          const auto report = verify_all(c);
          emit_json(c, io::report_to_json(report), out);
          print_failures(report, err);
          return all_passed(report) ? kPass : kVerificationFailure;
        },
        err);
  if (*simulate_cmd) return guarded([&] { return simulate(c, out, err); }, err);
  if (*recover_cmd) return guarded([&] { return recover(c, out, err); }, err);
  if (*iota_cmd) return guarded([&] { return bang_iota(c, out, err); }, err);
  if (*totality_cmd) return guarded([&] { return bang_totality(c, out, err); }, err);
  if (*chain_cmds[0]) return guarded([&] { return chain_build(c, out); }, err);
  if (*chain_cmds[1]) return guarded([&] { return chain_verify(c, out, err); }, err);
  return kInputError;
}

}  // namespace definetti::cli
