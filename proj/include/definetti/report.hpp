#pragma once

#include <optional>
#include <string>
#include <vector>

#include "definetti/rational.hpp"

namespace definetti {

/// One line of a verification report. Float deviations are stored exactly
/// (every double is a rational) and flagged so writers can print them as floats.
struct CheckResult {
  std::string check;
  std::string anchor;
  std::optional<std::size_t> level;
  Rational deviation;
  bool exact = true;
  bool passed = true;
  std::optional<std::string> witness;
};

using Report = std::vector<CheckResult>;

inline bool all_passed(const Report& report) {
  for (const auto& r : report)
    if (!r.passed) return false;
  return true;
}

inline CheckResult exact_check(std::string check, std::string anchor, std::optional<std::size_t> level,
                               Rational deviation) {
  CheckResult r;
  r.check = std::move(check);
  r.anchor = std::move(anchor);
  r.level = level;
  r.deviation = std::move(deviation);
  r.passed = r.deviation == 0;
  return r;
}

}  // namespace definetti
