#pragma once

// JSON formats for alphabets, kernels, bang elements, measures, recovery
// results and verification reports.
//
// Numbers may be written as JSON integers, decimal literals (read exactly,
// so 0.1 is 1/10), strings "p/q", or pairs [p, q].

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "definetti/bang.hpp"
#include "definetti/moments.hpp"
#include "definetti/report.hpp"
#include "definetti/stoch.hpp"

namespace definetti::io {

using nlohmann::json;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Rational rational_from_json(const json& j);
json rational_to_json(const Rational& r);  // "p/q" or "p"

Alphabet alphabet_from_json(const json& j);
json alphabet_to_json(const Alphabet& a);

/// {"kind": "unit"|"symbols"|"tuples"|"multisets"|"multisets_upto", "alphabet": [...], "size": n}
IndexSet index_set_from_json(const json& j);
json index_set_to_json(const IndexSet& s);

/// {"source", "target", "rows": [[[num, den], ...], ...]}
FinKernel kernel_from_json(const json& j);
json kernel_to_json(const FinKernel& k);
json matrix_to_json(const QMatrix& m);
QMatrix matrix_from_json(const json& j);

/// {"alphabet", "depth", "coeffs": [{"multiset": ["t", "t"], "value": "1/8"}, ...]}
/// Omitted multisets have coefficient 0.
BangElement bang_from_json(const json& j);
json bang_to_json(const BangElement& b);

/// {"atoms": [{"point": [...], "weight": w}, ...]}; the alphabet size is read
/// from the points, or from an optional "alphabet".
AtomicMeasure measure_from_json(const json& j);
json measure_to_json(const AtomicMeasure& m);

/// {"atoms", "residual", "grid_resolution", "within_tolerance", "diagnostic"?}
json recovery_to_json(const moments::Recovery& r);

/// {"check", "anchor", "level"?, "deviation", "passed", "witness"?}
json check_to_json(const CheckResult& c);
json report_to_json(const Report& report);

/// Reads a whole file as JSON; throws FormatError with the parser diagnostic.
json read_json_file(const std::string& path);

}  // namespace definetti::io
