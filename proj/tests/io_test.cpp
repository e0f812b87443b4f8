#include "definetti/io.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "definetti/pcoh.hpp"

using namespace definetti;
using namespace definetti::io;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

}  // namespace

TEST(ParseRational, Forms) {
  EXPECT_EQ(parse_rational("3/4"), q(3, 4));
  EXPECT_EQ(parse_rational("-6/8"), q(-3, 4));
  EXPECT_EQ(parse_rational("17"), q(17));
  EXPECT_EQ(parse_rational("0.8"), q(4, 5));
  EXPECT_EQ(parse_rational("0.125"), q(1, 8));
  EXPECT_EQ(parse_rational("007"), q(7));
  EXPECT_EQ(parse_rational("08/09"), q(8, 9));
  EXPECT_EQ(parse_rational("1e-6"), q(1, 1000000));
  EXPECT_EQ(parse_rational("-2.5E2"), q(-250));
  EXPECT_EQ(parse_rational(".5"), q(1, 2));
  EXPECT_EQ(parse_rational("0"), q(0));
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
  EXPECT_THROW(parse_rational(""), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/2/3"), std::invalid_argument);
}

TEST(JsonNumbers, AllSpellings) {
  EXPECT_EQ(rational_from_json(json::parse("0.4")), q(2, 5));
  EXPECT_EQ(rational_from_json(json::parse("3")), q(3));
  EXPECT_EQ(rational_from_json(json::parse("\"1/8\"")), q(1, 8));
  EXPECT_EQ(rational_from_json(json::parse("[2, 6]")), q(1, 3));
  EXPECT_EQ(rational_from_json(json::parse("[\"2\", \"6\"]")), q(1, 3));
  EXPECT_THROW(rational_from_json(json::parse("true")), FormatError);
  EXPECT_THROW(rational_from_json(json::parse("[1, 0]")), FormatError);
  EXPECT_EQ(rational_to_json(q(-3, 4)), json("-3/4"));
}

TEST(JsonAlphabet, RoundTrip) {
  const Alphabet a({"t", "f"});
  EXPECT_EQ(alphabet_from_json(alphabet_to_json(a)), a);
  EXPECT_EQ(alphabet_from_json(json::parse(R"(["x","y"])")), Alphabet({"x", "y"}));
  EXPECT_THROW(alphabet_from_json(json::parse(R"({"symbols":["x","x"]})")), FormatError);
  EXPECT_THROW(alphabet_from_json(json::parse(R"({"letters":["x"]})")), FormatError);
}

TEST(JsonKernel, RoundTrip) {
  const Alphabet a({"t", "f"});
  for (const auto& k : {dd_definetti_stoch(a, 2), eq_n_stoch(a, 2), discard_kernel(IndexSet::tuples(a, 2))}) {
    const auto back = kernel_from_json(kernel_to_json(k));
    EXPECT_EQ(back, k);
    EXPECT_EQ(back.source(), k.source());
    EXPECT_EQ(back.target(), k.target());
  }
  const auto j = kernel_to_json(dd_definetti_stoch(a, 1));
  EXPECT_EQ(j["rows"][1][0], json::parse("[1, 2]"));
  auto bad = j;
  bad["rows"][0][0] = json::parse("[2, 1]");
  EXPECT_THROW(kernel_from_json(bad), FormatError);
  bad = j;
  bad["rows"].erase(0);
  EXPECT_THROW(kernel_from_json(bad), FormatError);
}

TEST(JsonBang, RoundTripAndSparseInput) {
  const Alphabet a({"t", "f"});
  const auto b = pcoh::promotion({q(1, 3), q(1, 2)}, a, 3);
  EXPECT_EQ(bang_from_json(bang_to_json(b)), b);

  const auto sparse = bang_from_json(json::parse(R"({
    "alphabet": {"symbols": ["t", "f"]}, "depth": 2,
    "coeffs": [{"multiset": [], "value": 1}, {"multiset": ["t"], "value": "1/8"},
               {"multiset": ["f", "t"], "value": 0.25}]})"));
  EXPECT_EQ(sparse[Multiset({0, 0})], 1);
  EXPECT_EQ(sparse[Multiset({1, 0})], q(1, 8));
  EXPECT_EQ(sparse[Multiset({1, 1})], q(1, 4));
  EXPECT_EQ(sparse[Multiset({0, 2})], 0);

  EXPECT_THROW(bang_from_json(json::parse(R"({"alphabet":["t","f"],"depth":1,
    "coeffs":[{"multiset":["t","t"],"value":1}]})")), FormatError);
  EXPECT_THROW(bang_from_json(json::parse(R"({"alphabet":["t","f"],"depth":1,
    "coeffs":[{"multiset":["q"],"value":1}]})")), FormatError);
  EXPECT_THROW(bang_from_json(json::parse(R"({"alphabet":["t","f"],"depth":1,
    "coeffs":[{"multiset":["t"],"value":1},{"multiset":["t"],"value":1}]})")), FormatError);
  EXPECT_THROW(bang_from_json(json::parse(R"({"alphabet":["t","f"],"depth":1,
    "coeffs":[{"multiset":["t"],"value":-1}]})")), FormatError);
}

TEST(JsonMeasure, RoundTripAndValidation) {
  const AtomicMeasure m(2, {{ProbVector({q(1, 4), q(3, 4)}), q(1, 2)}, {ProbVector({1, 0}), q(1, 2)}});
  const auto back = measure_from_json(measure_to_json(m));
  EXPECT_EQ(back.atoms(), m.atoms());
  EXPECT_THROW(measure_from_json(json::parse(R"({"atoms":[{"point":[0.5,0.6],"weight":1}]})")), FormatError);
  EXPECT_THROW(measure_from_json(json::parse(R"({"atoms":[{"point":[0.5,0.5],"weight":2}]})")), FormatError);
  EXPECT_THROW(measure_from_json(json::parse(R"({"atoms":[]})")), FormatError);
  EXPECT_EQ(measure_from_json(json::parse(R"({"alphabet":["t","f"],"atoms":[]})")).alphabet_size(), 2u);
}

TEST(JsonReport, Fields) {
  Report r{exact_check("square", "anchor text", 2, q(1, 3))};
  CheckResult f{"float", "a", std::nullopt, Rational(0.5), false, true};
  r.push_back(f);
  const auto j = report_to_json(r);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_EQ(j["checks"][0]["deviation"], json("1/3"));
  EXPECT_EQ(j["checks"][0]["level"], json(2));
  EXPECT_EQ(j["checks"][1]["deviation"], json(0.5));
  EXPECT_FALSE(j["checks"][1].contains("level"));
}

TEST(JsonFile, Diagnostics) {
  EXPECT_THROW(read_json_file("/nonexistent/file.json"), FormatError);
  const std::string path = ::testing::TempDir() + "broken.json";
  {
    std::ofstream f(path);
    f << "{\"atoms\": [";
  }
  try {
    read_json_file(path);
    FAIL() << "expected a parse error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(path), std::string::npos);
  }
}
