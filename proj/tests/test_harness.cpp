#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <unistd.h>
#include <algorithm>
#include <cstdlib>

#include "nag/errors.hpp"
#include "nag/harness/config.hpp"
#include "nag/harness/csv.hpp"
#include "nag/harness/experiment.hpp"
#include "nag/harness/svg.hpp"

using namespace nag;
using namespace nag::harness;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("nagcert_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string quadratic_config(const std::string& extra_scheme = "", std::size_t iters = 10000) {
  return "name: q\n"
         "objective:\n"
         "  preset: quadratic-2d\n"
         "scheme:\n"
         "  kinds: [two_sequence, gradient_correction, implicit_velocity]\n"
         "  max_iter: " +
         std::to_string(iters) + "\n" + extra_scheme +
         "verify:\n"
         "  tail_decay: true\n";
}

}  // namespace

TEST_CASE("number formatting round-trips bit for bit") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(u(rng), static_cast<int>(u(rng)));
    CHECK(parse_number(format_number(v)) == v);
  }
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(10000.0) == "10000");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::isnan(parse_number(format_number(std::numeric_limits<double>::quiet_NaN()))));
  CHECK(parse_number("-inf") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS(parse_number("1,5"));
}

TEST_CASE("empty trace writes a header-only file") {
  TempDir dir;
  Trace empty;
  const fs::path p = dir.path / "empty.csv";
  write_csv(p, trace_table(empty));
  const std::string text = slurp(p);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(text.rfind("k,f_gap_y,f_gap_x,grad_norm_sq_y", 0) == 0);
  CHECK(read_csv(p).rows.empty());
}

TEST_CASE("trace CSV schema and round trip") {
  TempDir dir;
  SchemeConfig c;
  c.s = 0.5;
  c.x0 = {1.0};
  c.max_iter = 2;
  const Trace t = run(make_objective(preset_spec("quadratic-1d")), c);
  const CsvTable tab = trace_table(t);
  const fs::path p = dir.path / "t.csv";
  write_csv(p, tab);
  const std::string text = slurp(p);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
  CHECK(text.find('\r') == std::string::npos);
  const CsvTable back = read_csv(p);
  CHECK(back.header == kTraceColumns);
  REQUIRE(back.rows.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.rows[k][0] == static_cast<double>(k));
    for (std::size_t j = 0; j < tab.header.size(); ++j) {
      const double a = tab.rows[k][j], b = back.rows[k][j];
      CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }
  }
  CHECK(back.rows[1][10] == doctest::Approx(1.25));  // lyap_unified
  CHECK(back.rows[2][1] == doctest::Approx(0.017578125));
}

TEST_CASE("ODE CSV schema") {
  ContinuousRateReport rep;
  rep.samples.push_back({0.4, 0.1, 0.2, 0.3, 0.4, 0.5, true});
  const std::string text = render_csv(ode_table(rep));
  CHECK(text == "t,f_gap,lyap,bound_E0_over_t2,t3_inf_grad,t2_inf_gap\n"
                "0.40000000000000002,0.10000000000000001,0.20000000000000001,0.29999999999999999,"
                "0.40000000000000002,0.5\n");
}

TEST_CASE("write errors name the path") {
  try {
    write_csv("/nonexistent-dir/x.csv", CsvTable{{"a"}, {}});
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent-dir/x.csv") != std::string::npos);
  }
}

TEST_CASE("config parsing") {
  const ExperimentConfig cfg = parse_config(quadratic_config("  r: 3\n  s_frac: 0.5\n"));
  REQUIRE(cfg.scheme);
  CHECK(cfg.scheme->kinds.size() == 3);
  CHECK(cfg.scheme->r == 3.0);
  CHECK(cfg.scheme->s_frac == 0.5);
  CHECK(cfg.verify.tail_decay);
  CHECK(cfg.emit.csv);
  CHECK_FALSE(cfg.emit.svg);
  CHECK(cfg.objective.preset == "quadratic-2d");
}

TEST_CASE("config errors carry line numbers") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text, "cfg.yaml");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("objective:\n  preset: quadratic-2d\nscheme:\n  r: 1\n").rfind("cfg.yaml:4:", 0) == 0);
  CHECK(message("objective:\n  preset: quadratic-2d\nscheme:\n  speed: 3\n").find("cfg.yaml:4:3: unknown key 'speed'") !=
        std::string::npos);
  CHECK(message("objective:\n  preset: nope\nscheme: {}\n").rfind("cfg.yaml:2:", 0) == 0);
  CHECK(message("objective:\n  preset: quadratic-2d\n").find("'scheme' or 'ode'") != std::string::npos);
  CHECK(message("objective:\n  builtin: quadratic\n  matrix: [[1, 2], [3, 4]]\nscheme: {}\n").find("symmetric") !=
        std::string::npos);
  CHECK(message("objective: [1\n").rfind("cfg.yaml:", 0) == 0);
  CHECK_FALSE(message("objective:\n  preset: quadratic-2d\nscheme:\n  s: 0.1\n  s_frac: 0.5\n").empty());
}

TEST_CASE("run_experiment end to end") {
  TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path;
  const ExperimentOutcome out = run_experiment(parse_config(quadratic_config("  r: 2\n")), opts);
  CHECK(out.exit_code() == kExitOk);
  const CsvTable tab = read_csv(dir.path / "q_two_sequence_trace.csv");
  CHECK(tab.rows.size() == 10001);
  const std::string summary = slurp(dir.path / "summary.txt");
  CHECK(summary.find("PASS  q two_sequence  envelope_objective_y") != std::string::npos);
  CHECK(summary.find("FAIL") == std::string::npos);
  CHECK(fs::exists(dir.path / "q_two_sequence_envelope_min_grad_sq_y.csv"));
  CHECK_FALSE(fs::exists(dir.path / "q_two_sequence_gap.svg"));
}

TEST_CASE("step above 1/L is rejected before running") {
  TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path / "never";
  CHECK_THROWS_AS(run_experiment(parse_config(quadratic_config("  s_frac: 2.0\n")), opts), ConfigError);
  CHECK_FALSE(fs::exists(dir.path / "never"));
}

TEST_CASE("max_iter = 0 is a valid one-row run") {
  TempDir dir;
  RunOptions opts;
  opts.out_dir = dir.path;
  const ExperimentOutcome out = run_experiment(parse_config(quadratic_config("", 0)), opts);
  CHECK(out.exit_code() == kExitOk);
  CHECK(read_csv(dir.path / "q_two_sequence_trace.csv").rows.size() == 1);
}

TEST_CASE("SVG emission does not change numeric outputs") {
  TempDir a, b;
  RunOptions oa, ob;
  oa.out_dir = a.path;
  ob.out_dir = b.path;
  oa.svg = false;
  ob.svg = true;
  const ExperimentConfig cfg = parse_config(quadratic_config("", 500));
  run_experiment(cfg, oa);
  run_experiment(cfg, ob);
  CHECK(slurp(a.path / "q_implicit_velocity_trace.csv") == slurp(b.path / "q_implicit_velocity_trace.csv"));
  const std::string svg = slurp(b.path / "q_two_sequence_gap.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("envelope") != std::string::npos);
}

TEST_CASE("compare_schemes") {
  const Objective q = make_objective(preset_spec("quadratic-2d"));
  SchemeConfig base;
  base.s = 1.0 / q.lipschitz();
  base.x0 = preset_start("quadratic-2d", 2);
  base.max_iter = 500;
  const std::vector<SchemeKind> all(std::begin(kAllSchemes), std::end(kAllSchemes));
  const SchemeComparison cq = compare_schemes(q, base, all);
  CHECK(cq.max_deviation <= 1e-10);
  CHECK(cq.per_k.size() == 501);
  CHECK_THROWS_AS(compare_schemes(q, base, {SchemeKind::two_sequence}), ConfigError);

  const Objective lg = make_objective(preset_spec("logistic"));
  base.s = 1.0 / lg.lipschitz();
  base.x0 = Vec(3, 1.0);
  base.max_iter = 200;
  CHECK(compare_schemes(lg, base, all).max_deviation <= 1e-9);
}

TEST_CASE("output directory resolution") {
  RunOptions opts;
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_dir(std::nullopt, opts) == fs::path(kDefaultOutputDir));
  ::setenv(kOutputDirEnv, "/tmp/from-env", 1);
  CHECK(resolve_output_dir(std::nullopt, opts) == fs::path("/tmp/from-env"));
  CHECK(resolve_output_dir(fs::path("cfg-dir"), opts) == fs::path("cfg-dir"));
  opts.out_dir = "flag-dir";
  CHECK(resolve_output_dir(fs::path("cfg-dir"), opts) == fs::path("flag-dir"));
  ::unsetenv(kOutputDirEnv);
}

TEST_CASE("check log") {
  CheckLog log;
  log.add("c", "ok", 0.0, 3.0);
  log.report("c", "metric", -5.0, std::nullopt);
  CHECK(log.all_passed());
  log.add("c", "bad", -1e-3, 7.0);
  log.add("c", "nan", std::numeric_limits<double>::quiet_NaN(), std::nullopt);
  CHECK(log.failures() == 2);
  const std::string text = log.render();
  CHECK(text.find("FAIL  c  bad  worst_slack=-0.001  at=7") != std::string::npos);
  CHECK(text.find("INFO  c  metric") != std::string::npos);
}

TEST_CASE("log-spaced indices") {
  const auto idx = log_spaced_indices(10001, 50, true);
  CHECK(idx.front() == 0);
  CHECK(idx.back() == 10000);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(log_spaced_indices(0, 10).empty());
}
