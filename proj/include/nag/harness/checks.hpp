#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

// Outcome of one invariant check over a run, and the summary they form.
namespace nag::harness {

struct CheckResult {
  std::string cell;   // which run, e.g. "quadratic-2d r=3 s_frac=0.5"
  std::string name;   // which invariant
  double worst_slack = 0.0;  // >= 0 means satisfied; threshold already subtracted
  std::optional<double> where;  // k or t of the worst slack
  bool asserted = true;         // false for metrics that are only reported
  bool passed = true;
  std::string detail;
};

class CheckLog {
 public:
  // passed = worst_slack >= 0.
  void add(std::string cell, std::string name, double worst_slack, std::optional<double> where,
           std::string detail = {});
  void report(std::string cell, std::string name, double value, std::optional<double> where,
              std::string detail = {});
  void fail(std::string cell, std::string name, std::string detail);
  void append(const CheckLog& other);

  const std::vector<CheckResult>& results() const noexcept { return results_; }
  std::size_t failures() const noexcept;
  bool all_passed() const noexcept { return failures() == 0; }

  // One line per check: PASS|FAIL|INFO, cell, check, worst slack, location.
  std::string render() const;

 private:
  std::vector<CheckResult> results_;
};

}  // namespace nag::harness
