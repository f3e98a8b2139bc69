#include "nag/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "nag/diagnostics.hpp"
#include "nag/errors.hpp"
#include "nag/harness/csv.hpp"
#include "nag/harness/svg.hpp"
#include "nag/kernels.hpp"

namespace nag::harness {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kEquivalenceIterations = 500;
constexpr double kEquivalenceTolerance = 1e-9;
constexpr double kGradTailRatio = 0.05;
constexpr double kTailSumRatio = 0.01;
constexpr double kGapTailRatio = 0.05;
constexpr double kGradientCheckTolerance = 1e-6;
constexpr double kGradientCheckStep = 1e-5;
constexpr std::size_t kGradientCheckPoints = 32;
constexpr int kCertificatePairs = 1000;

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Tracks the minimum of a slack sequence and where it occurred.
struct Worst {
  double slack = kInf;
  double where = 0.0;
  void take(double v, double at) {
    if (!(v >= slack)) {  // NaN sticks
      slack = v;
      where = at;
    }
  }
};

void record(CheckLog& log, const std::string& cell, const std::string& name, const Worst& w) {
  if (w.slack == kInf) return;
  log.add(cell, name, w.slack, w.where);
}

std::string slug(std::string s) {
  for (char& c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.')) c = '_';
  return s;
}

double step_for(const SchemeSection& sec, const Objective& obj) {
  return sec.s ? *sec.s : sec.s_frac / obj.lipschitz();
}

struct Emitter {
  std::filesystem::path dir;
  bool csv = false;
  bool svg = false;
  std::vector<std::filesystem::path>* artifacts = nullptr;

  void table(const std::string& file, const CsvTable& t) const {
    if (!csv) return;
    const auto p = dir / file;
    write_csv(p, t);
    artifacts->push_back(p);
  }
  void plot(const std::string& file, const PlotSpec& spec) const {
    if (!svg) return;
    const auto p = dir / file;
    write_svg(p, spec);
    artifacts->push_back(p);
  }
};

PlotSpec make_plot(std::string title, std::string x_label, std::string y_label) {
  PlotSpec p;
  p.title = std::move(title);
  p.x_label = std::move(x_label);
  p.y_label = std::move(y_label);
  return p;
}

void emit_trace(const Emitter& em, const Trace& trace, const std::string& stem) {
  if (!em.csv && !em.svg) return;
  const CsvTable tab = trace_table(trace);
  em.table(stem + "_trace.csv", tab);
  const bool exact = trace.d0.has_value();
  if (exact) {
    for (auto q : {EnvelopeQuantity::objective_y, EnvelopeQuantity::objective_x, EnvelopeQuantity::min_grad_sq_y})
      if (trace.size() > (q == EnvelopeQuantity::objective_x ? 1u : 0u))
        em.table(stem + "_envelope_" + quantity_id(q) + ".csv", envelope_table(envelope_report(trace, q)));
  }
  if (!em.svg) return;

  const auto idx = log_spaced_indices(tab.rows.size(), 400);
  auto column = [&](std::size_t c) {
    PlotSeries s;
    for (auto i : idx) {
      s.x.push_back(tab.rows[i][0]);
      s.y.push_back(tab.rows[i][c]);
    }
    return s;
  };
  PlotSpec gap = make_plot("objective gap, " + stem, "k", "f(y_k) - f*");
  PlotSeries measured = column(1);
  measured.label = "f(y_k) - f*";
  gap.series.push_back(measured);
  if (exact) {
    PlotSeries env = column(12);
    env.label = "envelope";
    env.color = "#d62728";
    env.dashed = true;
    gap.series.push_back(env);
  }
  em.plot(stem + "_gap.svg", gap);

  PlotSpec grad = make_plot("k^3 min gradient norm^2, " + stem, "k", "k^3 min |grad f(y_i)|^2");
  PlotSeries g = column(6);
  g.label = "k^3 min grad^2";
  grad.series.push_back(g);
  em.plot(stem + "_k3_grad.svg", grad);

  if (exact) {
    PlotSpec lyap = make_plot("Lyapunov function, " + stem, "k", "E(k)");
    PlotSeries e = column(10);
    e.label = "E(k)";
    lyap.series.push_back(e);
    em.plot(stem + "_lyapunov.svg", lyap);
  }
}

void emit_ode(const Emitter& em, const ContinuousRateReport& report, const std::string& stem) {
  if (!em.csv && !em.svg) return;
  const CsvTable tab = ode_table(report);
  em.table(stem + "_ode.csv", tab);
  if (!em.svg) return;
  PlotSpec gap = make_plot("continuous objective gap, " + stem, "t", "f(X + sqrt(s) X') - f*");
  PlotSeries m, b, e;
  m.label = "gap";
  b.label = "E(t0)/t^2";
  b.color = "#d62728";
  b.dashed = true;
  e.label = "E(t)";
  e.color = "#2ca02c";
  for (const auto& row : tab.rows) {
    m.x.push_back(row[0]), m.y.push_back(row[1]);
    b.x.push_back(row[0]), b.y.push_back(row[3]);
    e.x.push_back(row[0]), e.y.push_back(row[2]);
  }
  gap.series = {m, b, e};
  em.plot(stem + "_ode.svg", gap);
}

void write_summary(const Emitter& em, const CheckLog& log, bool enabled) {
  if (!enabled) return;
  const auto p = em.dir / "summary.txt";
  write_text_atomic(p, log.render());
  em.artifacts->push_back(p);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error(dir.string() + ": cannot create output directory");
}

void print(std::ostream* os, const std::string& text) {
  if (os) *os << text << std::flush;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

double final_to_max_ratio(const std::vector<double>& values) {
  double peak = 0.0;
  for (double v : values)
    if (std::isfinite(v)) peak = std::max(peak, v);
  if (values.empty() || peak == 0.0) return 0.0;
  return values.back() / peak;
}

std::filesystem::path resolve_output_dir(const std::optional<std::filesystem::path>& config_dir,
                                         const RunOptions& opts) {
  if (opts.out_dir) return *opts.out_dir;
  if (config_dir) return *config_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return kDefaultOutputDir;
}

void verify_objective(const Objective& obj, std::uint64_t seed, const std::string& cell, CheckLog& log) {
  Worst grad;
  const auto points = sample_points(obj, kGradientCheckPoints, seed);
  for (std::size_t i = 0; i < points.size(); ++i)
    grad.take(kGradientCheckTolerance - gradient_check(obj, points[i], kGradientCheckStep), static_cast<double>(i));
  record(log, cell, "gradient_check", grad);

  log.add(cell, "smoothness_certificate", smoothness_certificate(obj, kCertificatePairs, seed) + kSmoothnessTolerance,
          std::nullopt, "L=" + fmt(obj.lipschitz()));

  Worst convex;
  const auto pts = sample_points(obj, 2 * 64, seed + 1);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2)
    convex.take(convexity_slack(obj, pts[i], pts[i + 1]) + kSmoothnessTolerance, static_cast<double>(i / 2));
  record(log, cell, "convexity", convex);
}

void verify_trace(const Trace& trace, const TraceChecks& which, const std::string& cell, CheckLog& log) {
  if (trace.failure) {
    log.fail(cell, "divergence", "k=" + std::to_string(trace.failure->k) + ": " + trace.failure->message);
    return;
  }
  const std::size_t n = trace.size();

  if (which.step_facts && n >= 2) {
    Worst descent, nonexp, inter;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      descent.take(descent_fact_slack(trace, k) + kInequalityTolerance, static_cast<double>(k));
      nonexp.take(gradient_nonexpansion_slack(trace, k) + kInequalityTolerance, static_cast<double>(k));
    }
    for (std::size_t k = 1; k < n; ++k)
      inter.take(kInequalityTolerance - interleaving_residual(trace, k), static_cast<double>(k));
    record(log, cell, "descent_fact", descent);
    record(log, cell, "gradient_nonexpansion", nonexp);
    record(log, cell, "interleaving", inter);
  }

  const bool exact = trace.minimizer.has_value() && trace.d0.has_value();
  if (exact && which.lyapunov) {
    const LyapunovSeries ls = lyapunov_series(trace);
    Worst agree, bound, mono, nonneg;
    for (std::size_t k = 0; k < n; ++k) {
      const double eu = ls.unified[k];
      const double dev = std::max(std::abs(ls.gradient_correction[k] - ls.implicit_velocity[k]),
                                  std::abs(ls.gradient_correction[k] - eu));
      agree.take(kLyapunovFormTolerance * (1.0 + std::abs(eu)) - dev, static_cast<double>(k));
      nonneg.take(eu + kInequalityTolerance, static_cast<double>(k));
      if (k + 1 < n) {
        bound.take(ls.decrease_slack[k] + kIdentityTolerance, static_cast<double>(k));
        mono.take(eu + kInequalityTolerance - ls.unified[k + 1], static_cast<double>(k));
      }
    }
    record(log, cell, "lyapunov_forms_agree", agree);
    record(log, cell, "lyapunov_decrease_bound", bound);
    record(log, cell, "lyapunov_nonincreasing", mono);
    record(log, cell, "lyapunov_nonnegative", nonneg);
  }

  if (exact && which.envelopes) {
    for (auto q : {EnvelopeQuantity::objective_y, EnvelopeQuantity::objective_x, EnvelopeQuantity::min_grad_sq_y}) {
      if (q == EnvelopeQuantity::objective_x && n < 2) continue;
      const EnvelopeReport rep = envelope_report(trace, q);
      log.add(cell, "envelope_" + quantity_id(q), rep.worst_slack() + kInequalityTolerance,
              static_cast<double>(rep.worst_k()));
    }
  }

  if (exact && which.series) {
    const std::vector<double> lhs = series_budget_profile(trace);
    const double budget = 0.5 * trace.config.r * trace.config.r * *trace.d0 * *trace.d0;
    Worst within, monotone;
    for (std::size_t K = 0; K < lhs.size(); ++K) {
      within.take(budget + kIdentityTolerance - lhs[K], static_cast<double>(K));
      if (K > 0) monotone.take(lhs[K] - lhs[K - 1], static_cast<double>(K));
    }
    record(log, cell, "series_budget", within);
    record(log, cell, "series_monotone", monotone);
  }

  if ((which.grad_tail || which.gap_tail || which.report_gap_tail) && n >= 2) {
    const std::vector<TailMetrics> tail = tail_profile(trace);
    std::vector<double> k3, tsum, k2;
    for (const auto& t : tail) {
      k3.push_back(t.k3_min_grad_sq);
      tsum.push_back(t.tail_sum);
      k2.push_back(t.k2_min_gap);
    }
    const double last = static_cast<double>(n - 1);
    if (which.grad_tail) {
      log.add(cell, "k3_min_grad_ratio", kGradTailRatio - final_to_max_ratio(k3), last);
      log.add(cell, "tail_sum_ratio", kTailSumRatio - final_to_max_ratio(tsum), last);
    }
    if (trace.f_star_known) {
      const double ratio = final_to_max_ratio(k2);
      if (which.gap_tail)
        log.add(cell, "k2_min_gap_ratio", kGapTailRatio - ratio, last);
      else if (which.report_gap_tail)
        log.report(cell, "k2_min_gap_ratio", ratio, last);
    }
  }
}

OdeCellResult verify_ode(const Objective& obj, const OdeConfig& cfg, const Vec& x0, const OdeChecks& which,
                         const std::string& cell, CheckLog& log) {
  OdeCellResult out;
  out.trajectory = ode_integrate(obj, cfg, x0);
  out.report = continuous_rate_report(out.trajectory, obj, cfg.r, cfg.s);

  log.add(cell, "ode_lyapunov_nonincreasing", lyapunov_monotonicity_slack(out.report, cfg.rtol, cfg.atol),
          std::nullopt);
  Worst bound;
  std::vector<double> t3, t2;
  for (const auto& smp : out.report.samples) {
    bound.take(smp.bound + 1e-12 - smp.gap, smp.t);
    t3.push_back(smp.t3_inf_grad_sq);
    t2.push_back(smp.t2_inf_gap);
  }
  record(log, cell, "ode_objective_bound", bound);
  const double t_end = out.report.samples.empty() ? 0.0 : out.report.samples.back().t;
  log.add(cell, "ode_t3_inf_grad_ratio", kGradTailRatio - final_to_max_ratio(t3), t_end);
  if (which.gap_tail)
    log.add(cell, "ode_t2_inf_gap_ratio", kGapTailRatio - final_to_max_ratio(t2), t_end);
  else
    log.report(cell, "ode_t2_inf_gap_ratio", final_to_max_ratio(t2), t_end);
  return out;
}

double discrete_continuous_error(const Objective& obj, double r, double s, std::size_t K, const Vec& x0, double rtol,
                                 double atol) {
  SchemeConfig sc;
  sc.r = r;
  sc.s = s;
  sc.x0 = x0;
  sc.max_iter = K;
  const Trace trace = run(obj, sc);
  if (trace.failure) throw std::runtime_error("discrete run diverged: " + trace.failure->message);

  OdeConfig oc;
  oc.r = r;
  oc.s = s;
  oc.rtol = rtol;
  oc.atol = atol;
  const double rs = std::sqrt(s);
  oc.t_end = static_cast<double>(K) * rs;
  for (std::size_t k = 1; k <= K; ++k) oc.sample_times.push_back(static_cast<double>(k) * rs);
  oc.sample_times.back() = oc.t_end;
  const Trajectory traj = ode_integrate(obj, oc, x0);

  double worst = 0.0;
  for (std::size_t k = 1; k <= K; ++k)
    worst = std::max(worst, std::sqrt(kernels::dist_sq(trace[k].x, traj.samples[k - 1].X)));
  return worst;
}

SchemeComparison compare_schemes(const Objective& obj, const SchemeConfig& base, const std::vector<SchemeKind>& kinds) {
  if (kinds.size() < 2) throw ConfigError("compare needs at least two schemes");
  SchemeComparison out;
  out.kinds = kinds;
  std::vector<Trace> traces;
  for (auto kind : kinds) {
    SchemeConfig cfg = base;
    cfg.scheme = kind;
    traces.push_back(run(obj, cfg));
    if (traces.back().failure)
      throw std::runtime_error(scheme_id(kind) + " diverged: " + traces.back().failure->message);
  }
  const std::size_t n = traces.front().size();
  out.per_k.assign(n, 0.0);
  for (std::size_t a = 0; a < traces.size(); ++a)
    for (std::size_t b = a + 1; b < traces.size(); ++b)
      for (std::size_t k = 0; k < n; ++k)
        out.per_k[k] = std::max(out.per_k[k], std::sqrt(kernels::dist_sq(traces[a][k].x, traces[b][k].x)));
  for (double d : out.per_k) out.max_deviation = std::max(out.max_deviation, d);
  return out;
}

SchemeComparison compare_schemes(const ExperimentConfig& cfg_in, const RunOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  if (opts.seed) cfg.seed = *opts.seed;
  if (!cfg.scheme) throw ConfigError("compare needs a 'scheme' section");
  const Objective obj = build_objective(cfg);
  SchemeConfig base;
  base.r = cfg.scheme->r;
  base.s = step_for(*cfg.scheme, obj);
  base.x0 = start_point(cfg, obj, cfg.scheme->x0);
  base.max_iter = cfg.scheme->max_iter;
  validate(base, obj);
  return compare_schemes(obj, base, cfg.scheme->kinds);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg_in, const RunOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  if (opts.seed) cfg.seed = *opts.seed;
  Objective obj = build_objective(cfg);

  // Validate every section before running anything.
  std::vector<SchemeConfig> schemes;
  if (cfg.scheme) {
    for (auto kind : cfg.scheme->kinds) {
      SchemeConfig sc;
      sc.r = cfg.scheme->r;
      sc.s = step_for(*cfg.scheme, obj);
      sc.scheme = kind;
      sc.x0 = start_point(cfg, obj, cfg.scheme->x0);
      sc.max_iter = cfg.scheme->max_iter;
      validate(sc, obj);
      schemes.push_back(std::move(sc));
    }
  }
  std::optional<OdeConfig> ode;
  Vec ode_x0;
  if (cfg.ode) {
    if (!obj.minimizer()) throw ConfigError("ode: objective has no known minimizer");
    OdeConfig oc;
    oc.r = cfg.ode->r;
    oc.s = cfg.ode->s;
    oc.rtol = cfg.ode->rtol;
    oc.atol = cfg.ode->atol;
    oc.t_end = cfg.ode->t_end.value_or(100.0 * std::sqrt(oc.s));
    oc.sample_times = uniform_times(lyapunov_start_time(oc.r, oc.s), oc.t_end, cfg.ode->samples);
    validate(oc);
    ode_x0 = start_point(cfg, obj, cfg.ode->x0);
    ode = std::move(oc);
  }

  ExperimentOutcome out;
  Emitter em;
  em.dir = resolve_output_dir(cfg.output_dir, opts);
  em.csv = opts.csv.value_or(cfg.emit.csv);
  em.svg = opts.svg.value_or(cfg.emit.svg);
  em.artifacts = &out.artifacts;
  if (em.csv || em.svg || cfg.emit.report) ensure_dir(em.dir);

  const std::string name = cfg.name;
  if (cfg.verify.objective) verify_objective(obj, cfg.seed, name, out.checks);

  if (!schemes.empty() && cfg.verify.tail_decay && !obj.optimal_value()) {
    print(opts.log, "estimating f* for " + obj.name() + "\n");
    obj = ensure_optimal_value(obj, schemes.front().x0);
  }

  TraceChecks which;
  which.step_facts = cfg.verify.step_facts;
  which.lyapunov = cfg.verify.lyapunov;
  which.envelopes = cfg.verify.envelopes;
  which.series = cfg.verify.series;
  which.grad_tail = cfg.verify.tail_decay;
  which.gap_tail = cfg.verify.tail_decay && cfg.scheme && cfg.scheme->r > 2.0;
  which.report_gap_tail = cfg.verify.tail_decay;

  for (const auto& sc : schemes) {
    const std::string cell = name + " " + scheme_id(sc.scheme);
    const Trace trace = run(obj, sc);
    verify_trace(trace, which, cell, out.checks);
    emit_trace(em, trace, slug(name + "_" + scheme_id(sc.scheme)));
  }
  if (schemes.size() >= 2) {
    SchemeConfig base = schemes.front();
    base.max_iter = std::min(base.max_iter, kEquivalenceIterations);
    const SchemeComparison cmp = compare_schemes(obj, base, cfg.scheme->kinds);
    out.checks.add(name, "scheme_equivalence", kEquivalenceTolerance - cmp.max_deviation, std::nullopt,
                   "first " + std::to_string(base.max_iter) + " iterations");
  }

  if (ode && cfg.verify.ode) {
    OdeChecks oc;
    oc.gap_tail = ode->r > 2.0;
    const auto res = verify_ode(obj, *ode, ode_x0, oc, name + " ode", out.checks);
    emit_ode(em, res.report, slug(name));
  }

  write_summary(em, out.checks, cfg.emit.report);
  if (!opts.quiet) print(opts.log, out.checks.render());
  return out;
}

ExperimentOutcome run_ode_experiment(const ExperimentConfig& cfg_in, const RunOptions& opts) {
  if (!cfg_in.ode) throw ConfigError("config has no 'ode' section");
  ExperimentConfig cfg = cfg_in;
  cfg.scheme.reset();
  cfg.verify.ode = true;
  return run_experiment(cfg, opts);
}

namespace {

struct Cell {
  std::string preset;
  double r;
  double s_frac;
};

std::string frac_label(double f) { return f == 1.0 ? "1" : fmt(f); }

}  // namespace

ExperimentOutcome verify_all(const VerifyAllOptions& opts) {
  const std::vector<std::string> presets = {"quadratic-2d", "quadratic-ill", "log-sum-exp", "logistic"};
  const double rs[] = {2.0, 3.0, 4.0};
  const double fracs[] = {1.0, 0.5};

  ExperimentOutcome out;
  Emitter em;
  if (opts.out_dir) {
    em.dir = *opts.out_dir;
    em.csv = opts.csv;
    em.svg = opts.svg;
    ensure_dir(em.dir);
  }
  em.artifacts = &out.artifacts;

  // Objectives, with f* estimated once where no closed form exists.
  std::vector<std::optional<Objective>> objectives(presets.size());
  std::vector<CheckLog> obj_logs(presets.size());
  parallel_for(presets.size(), opts.threads, [&](std::size_t i) {
    Objective obj = make_objective(preset_spec(presets[i], opts.seed));
    verify_objective(obj, opts.seed, presets[i], obj_logs[i]);
    const Vec x0 = preset_start(presets[i], obj.dim());
    objectives[i] = ensure_optimal_value(obj, x0);
  });
  for (auto& l : obj_logs) out.checks.append(l);
  print(opts.log, "objectives ready\n");

  std::vector<Cell> cells;
  for (const auto& p : presets)
    for (double r : rs)
      for (double f : fracs) cells.push_back({p, r, f});

  std::vector<CheckLog> logs(cells.size());
  std::vector<std::vector<std::filesystem::path>> files(cells.size());
  parallel_for(cells.size(), opts.threads, [&](std::size_t i) {
    const Cell& c = cells[i];
    const std::size_t oi = static_cast<std::size_t>(std::find(presets.begin(), presets.end(), c.preset) - presets.begin());
    const Objective& obj = *objectives[oi];
    const std::string cell = c.preset + " r=" + fmt(c.r) + " s_frac=" + frac_label(c.s_frac);
    const bool quad = c.preset.rfind("quadratic", 0) == 0;

    SchemeConfig base;
    base.r = c.r;
    base.s = c.s_frac / obj.lipschitz();
    base.x0 = preset_start(c.preset, obj.dim());
    base.max_iter = opts.iterations;

    TraceChecks which;
    which.grad_tail = quad || c.preset == "log-sum-exp";
    which.gap_tail = c.r > 2.0;
    which.report_gap_tail = true;

    Emitter cell_em = em;
    cell_em.artifacts = &files[i];
    for (auto kind : kAllSchemes) {
      SchemeConfig sc = base;
      sc.scheme = kind;
      const Trace trace = run(obj, sc);
      verify_trace(trace, which, cell + " " + scheme_id(kind), logs[i]);
      // The formulations agree, so one trace per cell is written.
      if (kind == SchemeKind::two_sequence && opts.out_dir)
        emit_trace(cell_em, trace, slug(c.preset + "_r" + fmt(c.r) + "_sfrac" + frac_label(c.s_frac)));
    }
    SchemeConfig eq = base;
    eq.max_iter = std::min(eq.max_iter, kEquivalenceIterations);
    const SchemeComparison cmp = compare_schemes(obj, eq, {std::begin(kAllSchemes), std::end(kAllSchemes)});
    logs[i].add(cell, "scheme_equivalence", kEquivalenceTolerance - cmp.max_deviation, std::nullopt,
                "first " + std::to_string(eq.max_iter) + " iterations");
  });
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.checks.append(logs[i]);
    out.artifacts.insert(out.artifacts.end(), files[i].begin(), files[i].end());
  }
  print(opts.log, "discrete cells done\n");

  // Exact weighted index identity, incrementally in 64-bit integers.
  for (std::int64_t r : {2, 3, 4}) {
    std::int64_t sum = 0;
    double worst = 0.0;
    std::optional<double> where;
    for (std::int64_t k = 0; k <= static_cast<std::int64_t>(opts.iterations); ++k) {
      sum += (k + 1) * (k + r + 1);
      const std::int64_t num = (k + 1) * (k + 2) * (2 * k + 3 * r + 3);
      if (num % 6 != 0 || num / 6 != sum) {
        worst = -1.0;
        where = static_cast<double>(k);
        break;
      }
    }
    out.checks.add("index-identity r=" + std::to_string(r), "weighted_index_sum", worst, where);
  }

  // Continuous-time cells.
  struct OdeCell {
    std::string preset;
    double r;
  };
  const std::vector<OdeCell> ode_cells = {{"quadratic-1d", 2.0}, {"quadratic-1d", 3.0}, {"quadratic-2d", 2.0},
                                          {"quadratic-2d", 3.0}};
  std::vector<CheckLog> ode_logs(ode_cells.size());
  std::vector<std::vector<std::filesystem::path>> ode_files(ode_cells.size());
  parallel_for(ode_cells.size(), opts.threads, [&](std::size_t i) {
    const OdeCell& c = ode_cells[i];
    const Objective obj = make_objective(preset_spec(c.preset, opts.seed));
    OdeConfig oc;
    oc.r = c.r;
    oc.s = 1e-2;
    oc.t_end = 100.0 * std::sqrt(oc.s);
    oc.sample_times = uniform_times(lyapunov_start_time(oc.r, oc.s), oc.t_end, 2000);
    OdeChecks which;
    which.gap_tail = c.r > 2.0;
    const std::string cell = c.preset + " ode r=" + fmt(c.r);
    const auto res = verify_ode(obj, oc, preset_start(c.preset, obj.dim()), which, cell, ode_logs[i]);
    if (opts.out_dir) {
      Emitter cell_em = em;
      cell_em.artifacts = &ode_files[i];
      emit_ode(cell_em, res.report, slug(c.preset + "_r" + fmt(c.r)));
    }
  });
  for (std::size_t i = 0; i < ode_cells.size(); ++i) {
    out.checks.append(ode_logs[i]);
    out.artifacts.insert(out.artifacts.end(), ode_files[i].begin(), ode_files[i].end());
  }

  {
    const Objective obj = make_objective(preset_spec("quadratic-1d", opts.seed));
    const Vec x0 = preset_start("quadratic-1d", 1);
    const double coarse = discrete_continuous_error(obj, 2.0, 1e-2, 50, x0);
    const double fine = discrete_continuous_error(obj, 2.0, 2.5e-3, 100, x0);
    out.checks.add("quadratic-1d r=2", "discrete_continuous_refinement", coarse - fine, std::nullopt,
                   "s=1e-2: " + fmt(coarse) + ", s=2.5e-3: " + fmt(fine));
  }
  print(opts.log, "continuous cells done\n");

  if (opts.out_dir) write_summary(em, out.checks, true);
  return out;
}

}  // namespace nag::harness
