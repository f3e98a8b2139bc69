// Acceptance criteria, one PASS/FAIL line each. Exit status 0 iff all pass.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "nag/diagnostics.hpp"
#include "nag/harness/csv.hpp"
#include "nag/harness/experiment.hpp"

using namespace nag;
using namespace nag::harness;
namespace fs = std::filesystem;

namespace {

struct Selection {
  std::size_t count = 0;
  std::size_t failed = 0;
  double worst = std::numeric_limits<double>::infinity();
  std::string worst_cell;
};

Selection select(const CheckLog& log, const std::function<bool(const CheckResult&)>& pred) {
  Selection s;
  for (const auto& r : log.results()) {
    if (!r.asserted || !pred(r)) continue;
    ++s.count;
    if (!r.passed) ++s.failed;
    if (!(r.worst_slack >= s.worst)) {
      s.worst = r.worst_slack;
      s.worst_cell = r.cell;
    }
  }
  return s;
}

auto named(std::initializer_list<const char*> names) {
  std::vector<std::string> v(names.begin(), names.end());
  return [v](const CheckResult& r) { return std::find(v.begin(), v.end(), r.name) != v.end(); };
}

int failures = 0;

void line(int id, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << "criterion " << id << ": " << (ok ? "PASS" : "FAIL") << "  " << what << "  (" << detail << ")"
            << std::endl;
}

std::string describe(const Selection& s) {
  std::ostringstream os;
  os << s.count << " checks, " << s.failed << " failed, worst slack " << format_number(s.worst);
  if (!s.worst_cell.empty()) os << " in " << s.worst_cell;
  return os.str();
}

bool ok(const Selection& s, std::size_t min_count) { return s.count >= min_count && s.failed == 0; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main() {
  VerifyAllOptions vo;
  const ExperimentOutcome all = verify_all(vo);
  const CheckLog& log = all.checks;
  // 4 objectives x 3 r x 2 s_frac; 12 cells have a known minimizer.
  constexpr std::size_t kCells = 24, kExactCells = 12, kSchemes = 3;

  {
    const Selection s = select(log, named({"scheme_equivalence"}));
    line(1, ok(s, kCells), "three formulations agree to 1e-9 over 500 iterations", describe(s));
  }
  {
    const Selection s = select(log, named({"lyapunov_forms_agree"}));
    line(2, ok(s, kExactCells * kSchemes), "Lyapunov forms agree to relative 1e-10", describe(s));
  }
  {
    const Selection s = select(log, named({"lyapunov_decrease_bound"}));
    SchemeConfig c;
    c.s = 0.5;
    c.x0 = {1.0};
    c.max_iter = 4;
    const Trace t = run(make_objective(preset_spec("quadratic-1d")), c);
    const double expect[] = {2.0, 1.25, 0.53125, 0.1396484375};
    double dev = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
      for (auto form : kAllForms) dev = std::max(dev, std::abs(lyapunov_value(t, k, form) - expect[k]));
    line(3, ok(s, kExactCells * kSchemes) && dev <= 1e-12, "per-step Lyapunov decrease bound, slack >= -1e-10",
         describe(s) + "; hand values E(0..3) off by " + format_number(dev));
  }
  {
    const Selection s = select(log, named({"envelope_objective_y", "envelope_objective_x", "envelope_min_grad_sq_y"}));
    line(4, ok(s, kExactCells * kSchemes * 3), "objective and gradient envelopes on quadratic cells", describe(s));
  }
  {
    const Selection s = select(log, named({"series_budget", "series_monotone", "weighted_index_sum"}));
    line(5, ok(s, kExactCells * kSchemes * 2 + 3), "series budget, monotone in K; exact index identity", describe(s));
  }
  {
    const Selection s = select(log, named({"k3_min_grad_ratio", "tail_sum_ratio"}));
    // quadratic-2d, quadratic-ill, log-sum-exp
    line(6, ok(s, 18 * kSchemes * 2), "k^3 min grad^2 <= 0.05 max and T(k) <= 0.01 max", describe(s));
  }
  {
    const Selection s = select(log, named({"k2_min_gap_ratio"}));
    std::size_t reported = 0;
    for (const auto& r : log.results())
      if (!r.asserted && r.name == "k2_min_gap_ratio") ++reported;
    line(7, ok(s, 16 * kSchemes) && reported == 8 * kSchemes, "k^2 min gap <= 0.05 max for r in {3,4}",
         describe(s) + "; reported for r=2 in " + std::to_string(reported) + " runs");
  }
  {
    const Selection s = select(log, named({"descent_fact", "gradient_nonexpansion"}));
    line(8, ok(s, kCells * kSchemes * 2), "descent fact and gradient non-expansion at every step", describe(s));
  }
  {
    const Selection s = select(log, [](const CheckResult& r) { return r.name.rfind("ode_", 0) == 0; });
    // 4 cells x (monotone, bound, t3) + 2 cells with r = 3 asserting t2
    line(9, ok(s, 14), "continuous Lyapunov decay, objective bound and tail ratios", describe(s));
  }
  {
    const Selection s = select(log, named({"discrete_continuous_refinement"}));
    std::string detail = describe(s);
    for (const auto& r : log.results())
      if (r.name == "discrete_continuous_refinement") detail += "; " + r.detail;
    line(10, ok(s, 1), "discrete iterates approach the ODE as s shrinks", detail);
  }
  {
    const fs::path base = fs::temp_directory_path() / ("nagcert_accept_" + std::to_string(::getpid()));
    fs::remove_all(base);
    const fs::path a = base / "a", b = base / "b";
    const std::string cli = NAGCERT_CLI;
    const int rc_a = std::system((cli + " verify-all --quiet --out " + a.string() + " > /dev/null").c_str());
    const int rc_b = std::system((cli + " verify-all --quiet --out " + b.string() + " > /dev/null").c_str());
    std::size_t files = 0, differing = 0;
    std::vector<fs::path> names;
    if (fs::exists(a))
      for (const auto& e : fs::directory_iterator(a)) names.push_back(e.path().filename());
    std::sort(names.begin(), names.end());
    for (const auto& n : names) {
      if (n.extension() != ".csv") continue;
      ++files;
      if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) ++differing;
    }
    const bool pass = rc_a == 0 && rc_b == 0 && files > 0 && differing == 0;
    line(11, pass, "verify-all exits 0; repeated runs give byte-identical CSV",
         "exit " + std::to_string(rc_a) + "/" + std::to_string(rc_b) + ", " + std::to_string(files) +
             " CSV files, " + std::to_string(differing) + " differ");
    fs::remove_all(base);
  }

  if (!log.all_passed()) std::cout << "verify-all reported " << log.failures() << " failed checks\n";
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return failures == 0 && log.all_passed() ? 0 : 1;
}
