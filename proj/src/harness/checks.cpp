#include "nag/harness/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nag/harness/csv.hpp"

namespace nag::harness {

void CheckLog::add(std::string cell, std::string name, double worst_slack, std::optional<double> where,
                   std::string detail) {
  CheckResult r;
  r.cell = std::move(cell);
  r.name = std::move(name);
  r.worst_slack = worst_slack;
  r.where = where;
  r.passed = worst_slack >= 0.0;  // NaN fails
  r.detail = std::move(detail);
  results_.push_back(std::move(r));
}

void CheckLog::report(std::string cell, std::string name, double value, std::optional<double> where,
                      std::string detail) {
  CheckResult r;
  r.cell = std::move(cell);
  r.name = std::move(name);
  r.worst_slack = value;
  r.where = where;
  r.asserted = false;
  r.detail = std::move(detail);
  results_.push_back(std::move(r));
}

void CheckLog::fail(std::string cell, std::string name, std::string detail) {
  CheckResult r;
  r.cell = std::move(cell);
  r.name = std::move(name);
  r.worst_slack = -1.0;
  r.passed = false;
  r.detail = std::move(detail);
  results_.push_back(std::move(r));
}

void CheckLog::append(const CheckLog& other) {
  results_.insert(results_.end(), other.results_.begin(), other.results_.end());
}

std::size_t CheckLog::failures() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(results_.begin(), results_.end(), [](const CheckResult& r) { return r.asserted && !r.passed; }));
}

std::string CheckLog::render() const {
  std::ostringstream os;
  for (const auto& r : results_) {
    os << (!r.asserted ? "INFO" : r.passed ? "PASS" : "FAIL") << "  " << r.cell << "  " << r.name << "  "
       << (r.asserted ? "worst_slack=" : "value=") << format_number(r.worst_slack);
    if (r.where) os << "  at=" << format_number(*r.where);
    if (!r.detail.empty()) os << "  (" << r.detail << ')';
    os << '\n';
  }
  os << "checks=" << results_.size() << " failed=" << failures() << '\n';
  return os.str();
}

}  // namespace nag::harness
