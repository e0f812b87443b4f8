#include "definetti/io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace definetti::io {

namespace {

std::string integer_text(const json& j) {
  if (j.is_number_integer()) return j.dump();
  if (j.is_string()) return j.get<std::string>();
  throw FormatError("expected an integer, got " + j.dump());
}

json integer_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return json(static_cast<long long>(v));
  return json(v.str());
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw FormatError(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::size_t size_from_json(const json& j) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw FormatError("expected a nonnegative integer, got " + j.dump());
  return j.get<std::size_t>();
}

}  // namespace

Rational rational_from_json(const json& j) {
  try {
    if (j.is_number_integer()) return Rational(BigInt(j.dump()));
    if (j.is_number_float()) return parse_rational(j.dump());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_array() && j.size() == 2) {
      const Rational r = parse_rational(integer_text(j[0]) + "/" + integer_text(j[1]));
      return r;
    }
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError("bad number " + j.dump() + ": " + e.what());
  }
  throw FormatError("expected a number, got " + j.dump());
}

json rational_to_json(const Rational& r) { return to_string(r); }

Alphabet alphabet_from_json(const json& j) {
  const json& symbols = j.is_array() ? j : field(j, "symbols");
  if (!symbols.is_array()) throw FormatError("alphabet symbols must be an array");
  std::vector<std::string> names;
  for (const auto& s : symbols) {
    if (!s.is_string()) throw FormatError("alphabet symbols must be strings");
    names.push_back(s.get<std::string>());
  }
  try {
    return Alphabet(std::move(names));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json alphabet_to_json(const Alphabet& a) { return json{{"symbols", a.symbols()}}; }

IndexSet index_set_from_json(const json& j) {
  const auto kind = field(j, "kind").get<std::string>();
  if (kind == "unit") return IndexSet::unit();
  if (kind == "product") {
    const auto& factors = field(j, "factors");
    if (!factors.is_array() || factors.size() != 2) throw FormatError("product needs two factors");
    return IndexSet::product(index_set_from_json(factors[0]), index_set_from_json(factors[1]));
  }
  const Alphabet alphabet = alphabet_from_json(field(j, "alphabet"));
  if (kind == "symbols") return IndexSet::symbols(alphabet);
  const std::size_t size = size_from_json(field(j, "size"));
  if (kind == "tuples") return IndexSet::tuples(alphabet, size);
  if (kind == "multisets") return IndexSet::multisets(alphabet, size);
  if (kind == "multisets_upto") return IndexSet::multisets_upto(alphabet, size);
  throw FormatError("unknown index set kind '" + kind + "'");
}

json index_set_to_json(const IndexSet& s) {
  using Kind = IndexSet::Kind;
  switch (s.kind()) {
    case Kind::unit:
      return json{{"kind", "unit"}};
    case Kind::product:
      return json{{"kind", "product"},
                  {"factors", json::array({index_set_to_json(s.factors()[0]), index_set_to_json(s.factors()[1])})}};
    case Kind::symbols:
      return json{{"kind", "symbols"}, {"alphabet", s.alphabet().symbols()}};
    case Kind::tuples:
      return json{{"kind", "tuples"}, {"alphabet", s.alphabet().symbols()}, {"size", s.arity()}};
    case Kind::multisets:
      return json{{"kind", "multisets"}, {"alphabet", s.alphabet().symbols()}, {"size", s.arity()}};
    case Kind::multisets_upto:
      return json{{"kind", "multisets_upto"}, {"alphabet", s.alphabet().symbols()}, {"size", s.arity()}};
  }
  throw std::logic_error("unreachable index set kind");
}

json matrix_to_json(const QMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(json::array({integer_to_json(numerator(m(i, j))), integer_to_json(denominator(m(i, j)))}));
    rows.push_back(std::move(row));
  }
  return rows;
}

QMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw FormatError("rows must be a non-empty array");
  const std::size_t cols = j[0].size();
  QMatrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw FormatError("row " + std::to_string(i) + " has the wrong length");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = rational_from_json(j[i][c]);
  }
  return m;
}

FinKernel kernel_from_json(const json& j) {
  IndexSet source = index_set_from_json(field(j, "source"));
  IndexSet target = index_set_from_json(field(j, "target"));
  QMatrix m = matrix_from_json(field(j, "rows"));
  if (m.rows() != source.size() || m.cols() != target.size())
    throw FormatError("kernel is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                      std::to_string(source.size()) + "x" + std::to_string(target.size()));
  bool stochastic = true;
  for (std::size_t i = 0; i < m.rows() && stochastic; ++i) {
    Rational total = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) total += m(i, c);
    stochastic = total == 1;
  }
  try {
    return FinKernel(std::move(source), std::move(target), std::move(m),
                     stochastic ? KernelKind::stochastic : KernelKind::substochastic);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json kernel_to_json(const FinKernel& k) {
  return json{{"source", index_set_to_json(k.source())},
              {"target", index_set_to_json(k.target())},
              {"rows", matrix_to_json(k.entries())}};
}

BangElement bang_from_json(const json& j) {
  const Alphabet alphabet = alphabet_from_json(field(j, "alphabet"));
  const std::size_t depth = size_from_json(field(j, "depth"));
  BangElement b(alphabet, depth);
  std::vector<bool> seen(b.coeffs().size(), false);
  const auto& coeffs = field(j, "coeffs");
  if (!coeffs.is_array()) throw FormatError("coeffs must be an array");
  for (const auto& entry : coeffs) {
    std::vector<std::size_t> counts(alphabet.size(), 0);
    for (const auto& s : field(entry, "multiset")) {
      try {
        ++counts[alphabet.index_of(s.get<std::string>())];
      } catch (const std::exception&) {
        throw FormatError("unknown symbol " + s.dump() + " in multiset");
      }
    }
    const Multiset mu(counts);
    const auto idx = b.index().find(mu);
    if (!idx) throw FormatError("multiset " + mu.to_string(alphabet) + " exceeds depth " + std::to_string(depth));
    if (seen[*idx]) throw FormatError("multiset " + mu.to_string(alphabet) + " listed twice");
    seen[*idx] = true;
    const Rational value = rational_from_json(field(entry, "value"));
    if (value < 0) throw FormatError("negative coefficient at " + mu.to_string(alphabet));
    b.set(mu, value);
  }
  return b;
}

json bang_to_json(const BangElement& b) {
  json coeffs = json::array();
  for (const auto& mu : b.index().multisets()) {
    json names = json::array();
    for (std::size_t a = 0; a < mu.alphabet_size(); ++a)
      for (std::size_t i = 0; i < mu.count(a); ++i) names.push_back(b.alphabet().symbol(a));
    coeffs.push_back(json{{"multiset", names}, {"value", rational_to_json(b[mu])}});
  }
  return json{{"alphabet", alphabet_to_json(b.alphabet())}, {"depth", b.depth()}, {"coeffs", coeffs}};
}

AtomicMeasure measure_from_json(const json& j) {
  const auto& atoms_json = field(j, "atoms");
  if (!atoms_json.is_array()) throw FormatError("atoms must be an array");
  std::optional<std::size_t> k;
  if (j.contains("alphabet")) k = alphabet_from_json(j.at("alphabet")).size();
  std::vector<Atom> atoms;
  for (const auto& a : atoms_json) {
    std::vector<Rational> point;
    for (const auto& x : field(a, "point")) point.push_back(rational_from_json(x));
    if (!k) k = point.size();
    if (point.size() != *k) throw FormatError("atom points have different lengths");
    try {
      atoms.push_back({ProbVector(std::move(point)), rational_from_json(field(a, "weight"))});
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  if (!k) throw FormatError("empty measure needs an alphabet");
  try {
    return AtomicMeasure(*k, std::move(atoms));
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
}

json measure_to_json(const AtomicMeasure& m) {
  json atoms = json::array();
  for (const auto& atom : m.atoms()) {
    json point = json::array();
    for (const auto& x : atom.point.weights) point.push_back(rational_to_json(x));
    atoms.push_back(json{{"point", point}, {"weight", rational_to_json(atom.weight)}});
  }
  return json{{"atoms", atoms}};
}

json recovery_to_json(const moments::Recovery& r) {
  json out = measure_to_json(r.measure);
  out["residual"] = rational_to_json(r.residual);
  out["residual_float"] = to_double(r.residual);
  out["grid_resolution"] = r.grid_resolution;
  out["within_tolerance"] = r.within_tolerance;
  if (!r.diagnostic.empty()) out["diagnostic"] = r.diagnostic;
  return out;
}

json check_to_json(const CheckResult& c) {
  json out{{"check", c.check}, {"anchor", c.anchor}, {"passed", c.passed}};
  if (c.level) out["level"] = *c.level;
  if (c.exact)
    out["deviation"] = rational_to_json(c.deviation);
  else
    out["deviation"] = to_double(c.deviation);
  if (c.witness) out["witness"] = *c.witness;
  return out;
}

json report_to_json(const Report& report) {
  json checks = json::array();
  for (const auto& c : report) checks.push_back(check_to_json(c));
  return json{{"passed", all_passed(report)}, {"checks", checks}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace definetti::io
