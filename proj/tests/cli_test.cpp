#include "cli.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "definetti/io.hpp"

using definetti::io::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "definetti");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = definetti::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << content;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Moment table rows "symbol,order,mixing,empirical,abs_error" after the header.
std::vector<double> moment_errors(const std::string& csv) {
  std::vector<double> errors;
  std::istringstream in(csv);
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    if (line.rfind("symbol,order", 0) == 0) {
      in_table = true;
      continue;
    }
    if (!in_table || line.empty()) continue;
    errors.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  }
  return errors;
}

const std::string kTwoAtoms = R"({"atoms":[{"point":["1/4","3/4"],"weight":"1/2"},{"point":[0.8,0.2],"weight":0.5}]})";
const std::string kVertices = R"({"atoms":[{"point":[1,0],"weight":"1/3"},{"point":[0,1],"weight":"2/3"}]})";

}  // namespace

TEST(VerifyAll, DefaultConfigPasses) {
  const auto r = run({"verify-all"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["passed"].get<bool>());
  for (const auto& c : j["checks"]) {
    EXPECT_EQ(c["deviation"], json("0")) << c.dump();
    EXPECT_FALSE(c["anchor"].get<std::string>().empty());
  }
}

TEST(VerifyAll, OrderIsDeterministic) { EXPECT_EQ(run({"verify-all", "--seed", "9"}).out, run({"verify-all", "--seed", "9"}).out); }

TEST(VerifyAll, ThreeLetterAlphabet) {
  const auto path = temp_file("xyz.json", R"({"symbols":["x","y","z"]})");
  const auto r = run({"verify-all", "--alphabet", path, "--depth", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(VerifyAll, InjectedFaultNamesTheSquare) {
  const auto r = run({"verify-all", "--inject-fault"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("dd_square/stoch/X level 1"), std::string::npos) << r.err;
}

TEST(VerifyAll, InputErrors) {
  EXPECT_EQ(run({"verify-all", "--alphabet", "/nonexistent.json"}).code, 2);
  EXPECT_EQ(run({"verify-all", "--alphabet", temp_file("bad.json", "{oops")}).code, 2);
  EXPECT_EQ(run({"verify-all", "--mode", "fuzzy"}).code, 2);
  EXPECT_EQ(run({"verify-all", "--tol", "-1"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Simulate, VertexDiracIsASpike) {
  const auto path = temp_file("dirac.json", R"({"atoms":[{"point":[1,0],"weight":1}]})");
  const auto out = ::testing::TempDir() + "dirac.csv";
  const auto r = run({"definetti", "simulate", "--mixing", path, "--prefix-len", "50", "--trials", "200", "--out", out});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(out);
  EXPECT_EQ(csv, "k_t,k_f,z_t,z_f,count,frequency\n50,0,1.000000,0.000000,200,1.000000\n");
}

TEST(Simulate, TwoAtomMomentsAndDeterminism) {
  const auto path = temp_file("two.json", kTwoAtoms);
  const auto a = ::testing::TempDir() + "a.csv";
  const auto b = ::testing::TempDir() + "b.csv";
  const auto r1 = run({"definetti", "simulate", "--mixing", path, "--prefix-len", "1000", "--trials", "10000", "--seed",
                       "42", "--out", a, "--workers", "1"});
  const auto r2 = run({"definetti", "simulate", "--mixing", path, "--prefix-len", "1000", "--trials", "10000", "--seed",
                       "42", "--out", b, "--workers", "3"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(r1.out, r2.out);
  const auto errors = moment_errors(r1.out);
  ASSERT_EQ(errors.size(), 6u);
  for (double e : errors) EXPECT_LE(e, 0.02);
}

TEST(Simulate, RejectsNonProbabilityMixing) {
  const auto path = temp_file("half.json", R"({"atoms":[{"point":[0.4,0.6],"weight":0.5}]})");
  EXPECT_EQ(run({"definetti", "simulate", "--mixing", path}).code, 2);
}

TEST(Recover, IotaRoundTrip) {
  const auto mix = temp_file("mix.json", kTwoAtoms);
  const auto bang = ::testing::TempDir() + "mix_bang.json";
  ASSERT_EQ(run({"bang", "iota", "--mixing", mix, "--depth", "6", "--out", bang}).code, 0);
  const auto r = run({"definetti", "recover", "--bang", bang, "--grid", "20"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_LE(j["residual_float"].get<double>(), 1e-6);
  EXPECT_EQ(j["grid_resolution"], json(20));
  EXPECT_FALSE(j["atoms"].empty());
}

TEST(Recover, VertexMixingIsExact) {
  const auto mix = temp_file("vert.json", kVertices);
  const auto bang = ::testing::TempDir() + "vert_bang.json";
  ASSERT_EQ(run({"bang", "iota", "--mixing", mix, "--depth", "6", "--out", bang}).code, 0);
  const auto r = run({"definetti", "recover", "--bang", bang, "--grid", "8", "--mode", "exact"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["residual"], json("0"));
}

TEST(Recover, DampedInputFails) {
  // Promotion of (1/2, 1/2) at depth 2 damped by p = 1/2: coefficient 2^-|mu| * 2^-|mu|.
  const auto bang = temp_file("damped.json", R"({"alphabet":["t","f"],"depth":2,"coeffs":[
    {"multiset":[],"value":1},{"multiset":["t"],"value":"1/4"},{"multiset":["f"],"value":"1/4"},
    {"multiset":["t","t"],"value":"1/16"},{"multiset":["t","f"],"value":"1/16"},{"multiset":["f","f"],"value":"1/16"}]})");
  const auto r = run({"definetti", "recover", "--bang", bang});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("at []"), std::string::npos) << r.err;
  const auto t = run({"bang", "totality", "--bang", bang});
  EXPECT_EQ(t.code, 1);
  EXPECT_EQ(json::parse(t.out)["defect"], json("1/2"));
}

TEST(Recover, CoarseGridAsksForResolution) {
  const auto mix = temp_file("third.json", R"({"atoms":[{"point":["1/3","2/3"],"weight":1}]})");
  const auto bang = ::testing::TempDir() + "third_bang.json";
  ASSERT_EQ(run({"bang", "iota", "--mixing", mix, "--depth", "4", "--out", bang}).code, 0);
  const auto r = run({"definetti", "recover", "--bang", bang, "--grid", "4", "--mode", "exact"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("increase resolution"), std::string::npos);
}

TEST(Bang, SubstochasticIotaIsFlagged) {
  const auto mix = temp_file("sub.json", R"({"atoms":[{"point":[0.4,0.6],"weight":0.5}]})");
  const auto r = run({"bang", "iota", "--mixing", mix, "--depth", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("substochastic, not total"), std::string::npos);
  const auto bang = temp_file("sub_bang.json", r.out);
  EXPECT_EQ(run({"bang", "totality", "--bang", bang}).code, 1);
}

TEST(Bang, TotalityTolerance) {
  const auto bang = temp_file("near.json", R"({"alphabet":["t","f"],"depth":1,"coeffs":[
    {"multiset":[],"value":1},{"multiset":["t"],"value":0.5},{"multiset":["f"],"value":0.5000000001}]})");
  EXPECT_EQ(run({"bang", "totality", "--bang", bang}).code, 1);
  EXPECT_EQ(run({"bang", "totality", "--bang", bang, "--tol", "1e-9"}).code, 0);
}

TEST(Chain, BuildAndVerify) {
  const auto r = run({"chain", "build", "--backend", "stoch", "--depth", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["dd"].size(), 2u);
  const auto dd1 = definetti::io::kernel_from_json(j["dd"][1]);
  EXPECT_EQ(dd1, definetti::dd_definetti_stoch(definetti::Alphabet({"t", "f"}), 1));
  for (const auto* backend : {"stoch", "pcoh-definetti", "pcoh-free"})
    EXPECT_EQ(run({"chain", "verify", "--backend", backend, "--depth", "3"}).code, 0) << backend;
  const auto bad = run({"chain", "verify", "--backend", "pcoh-free", "--inject-fault"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("FAILED dd_square/pcoh"), std::string::npos);
  EXPECT_EQ(run({"chain", "build", "--backend", "nope"}).code, 2);
}
