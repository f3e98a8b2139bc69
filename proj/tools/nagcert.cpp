// nagcert: run, compare and verify accelerated gradient experiments.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "nag/errors.hpp"
#include "nag/harness/csv.hpp"
#include "nag/harness/experiment.hpp"

namespace h = nag::harness;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<bool> csv;
  std::optional<bool> svg;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "Global seed (objective data and sampling)");
  app->add_flag_callback("--csv", [&c] { c.csv = true; }, "Write CSV outputs");
  app->add_flag_callback("--no-csv", [&c] { c.csv = false; }, "Skip CSV outputs");
  app->add_flag_callback("--svg", [&c] { c.svg = true; }, "Write SVG plots");
  app->add_flag_callback("--no-svg", [&c] { c.svg = false; }, "Skip SVG plots");
  app->add_flag("--quiet,-q", c.quiet, "Only print failures");
}

h::RunOptions options(const Common& c, const std::optional<std::string>& out) {
  h::RunOptions o;
  o.seed = c.seed;
  o.csv = c.csv;
  o.svg = c.svg;
  o.quiet = c.quiet;
  o.log = &std::cout;
  if (out) o.out_dir = *out;
  return o;
}

int finish(const h::ExperimentOutcome& res, bool quiet) {
  if (quiet) {
    for (const auto& r : res.checks.results())
      if (r.asserted && !r.passed)
        std::cout << "FAIL  " << r.cell << "  " << r.name << "  worst_slack=" << h::format_number(r.worst_slack)
                  << (r.where ? "  at=" + h::format_number(*r.where) : std::string()) << '\n';
  }
  std::cout << (res.checks.all_passed() ? "PASS" : "FAIL") << ": " << res.checks.results().size() << " checks, "
            << res.checks.failures() << " failed\n";
  return res.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certify accelerated gradient iterations against their Lyapunov bounds"};
  app.require_subcommand(1);

  Common common;
  std::string config_path;
  std::optional<std::string> out_dir;
  bool table = false;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run the schemes and ODE of a config and verify them");
  run->add_option("config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  add_common(run, common);

  auto* verify = app.add_subcommand("verify-all", "Run the default verification matrix");
  verify->add_option("--out", out_dir, "Output directory (no files when omitted and NAGCERT_OUT_DIR unset)");
  verify->add_option("--threads", threads, "Worker threads, 0 = all cores");
  add_common(verify, common);

  auto* compare = app.add_subcommand("compare", "Max iterate deviation between the configured schemes");
  compare->add_option("config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  compare->add_flag("--table", table, "Print the per-k deviation");
  add_common(compare, common);

  auto* ode = app.add_subcommand("ode", "Integrate and verify the ODE section of a config");
  ode->add_option("config", config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  ode->add_option("--out", out_dir, "Output directory");
  add_common(ode, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto cfg = h::load_config(config_path);
      return finish(h::run_experiment(cfg, options(common, out_dir)), common.quiet);
    }
    if (*ode) {
      const auto cfg = h::load_config(config_path);
      return finish(h::run_ode_experiment(cfg, options(common, out_dir)), common.quiet);
    }
    if (*compare) {
      const auto cfg = h::load_config(config_path);
      const auto cmp = h::compare_schemes(cfg, options(common, std::nullopt));
      if (table) {
        std::cout << "k,max_deviation\n";
        for (std::size_t k = 0; k < cmp.per_k.size(); ++k)
          std::cout << k << ',' << h::format_number(cmp.per_k[k]) << '\n';
      }
      std::cout << "max_deviation=" << h::format_number(cmp.max_deviation) << '\n';
      return h::kExitOk;
    }
    if (*verify) {
      h::VerifyAllOptions vo;
      if (out_dir) {
        vo.out_dir = *out_dir;
      } else if (const char* env = std::getenv(h::kOutputDirEnv); env && *env) {
        vo.out_dir = env;
      }
      vo.csv = common.csv.value_or(true);
      vo.svg = common.svg.value_or(false);
      if (common.seed) vo.seed = *common.seed;
      vo.threads = threads;
      vo.log = common.quiet ? nullptr : &std::cerr;
      const auto res = h::verify_all(vo);
      if (!common.quiet) std::cout << res.checks.render();
      return finish(res, common.quiet);
    }
  } catch (const nag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return h::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return h::kExitRuntime;
  }
  return h::kExitRuntime;
}
