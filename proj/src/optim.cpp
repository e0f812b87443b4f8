#include "definetti/optim.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace definetti::optim {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal:
      return "optimal";
    case LpStatus::unbounded:
      return "unbounded";
    case LpStatus::infeasible:
      return "infeasible";
    case LpStatus::numerical:
      return "numerical failure";
  }
  return "unknown";
}

namespace {

std::mutex audit_mutex;
SolveAudit audit;

}  // namespace

SolveAudit solve_audit() {
  std::lock_guard lock(audit_mutex);
  return audit;
}

void reset_solve_audit() {
  std::lock_guard lock(audit_mutex);
  audit = SolveAudit{};
}

void record_solve(const LpSolution<Rational>& sol) {
  if (sol.status != LpStatus::optimal) return;
  const Rational gap = abs(sol.duality_gap());
  std::lock_guard lock(audit_mutex);
  ++audit.exact_solves;
  audit.worst_exact_gap = std::max(audit.worst_exact_gap, gap);
  audit.worst_exact_violation = std::max(audit.worst_exact_violation, sol.max_violation);
}

void record_solve(const LpSolution<double>& sol) {
  std::lock_guard lock(audit_mutex);
  if (sol.status == LpStatus::numerical) ++audit.float_failures;
  if (sol.status != LpStatus::optimal) return;
  ++audit.float_solves;
  audit.worst_float_gap = std::max(audit.worst_float_gap, std::abs(sol.duality_gap()));
  audit.worst_float_violation = std::max(audit.worst_float_violation, sol.max_violation);
}

}  // namespace definetti::optim
