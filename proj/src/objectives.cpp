#include "nag/objectives.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nag/errors.hpp"
#include "nag/kernels.hpp"

namespace nag {
namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
  return out;
}

double largest_eigenvalue_of_gram(const DenseMatrix& a) {
  const Eigen::MatrixXd m = to_eigen(a);
  const Eigen::MatrixXd gram = m.transpose() * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

class QuadraticModel final : public Objective::Model {
 public:
  QuadraticModel(DenseMatrix a, Vec b, Vec minimizer)
      : a_(std::move(a)), b_(std::move(b)), minimizer_(std::move(minimizer)) {}

  double value(std::span<const double> x) const override {
    double quad = 0.0;
    for (std::size_t i = 0; i < a_.rows; ++i) quad += x[i] * kernels::dot(a_.row(i), x);
    return 0.5 * quad - kernels::dot(b_, x);
  }

  void gradient(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t i = 0; i < a_.rows; ++i) out[i] = kernels::dot(a_.row(i), x) - b_[i];
  }

  // 1/2 (x - x*)' A (x - x*)
  std::optional<double> exact_gap(std::span<const double> x) const override {
    Vec e(x.size());
    kernels::axpby(1.0, x, -1.0, minimizer_, e);
    double quad = 0.0;
    for (std::size_t i = 0; i < a_.rows; ++i) quad += e[i] * kernels::dot(a_.row(i), e);
    return 0.5 * quad;
  }

 private:
  DenseMatrix a_;
  Vec b_;
  Vec minimizer_;
};

class LogSumExpModel final : public Objective::Model {
 public:
  LogSumExpModel(DenseMatrix a, Vec b) : a_(std::move(a)), b_(std::move(b)) {}

  double value(std::span<const double> x) const override {
    Vec z = affine(x);
    const double m = *std::max_element(z.begin(), z.end());
    double acc = 0.0;
    for (double zi : z) acc += std::exp(zi - m);
    return m + std::log(acc);
  }

  void gradient(std::span<const double> x, std::span<double> out) const override {
    Vec z = affine(x);
    const double m = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& zi : z) {
      zi = std::exp(zi - m);
      total += zi;
    }
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < a_.rows; ++i) kernels::axpy(z[i] / total, a_.row(i), out);
  }

 private:
  Vec affine(std::span<const double> x) const {
    Vec z(a_.rows);
    for (std::size_t i = 0; i < a_.rows; ++i) z[i] = kernels::dot(a_.row(i), x) + b_[i];
    return z;
  }

  DenseMatrix a_;
  Vec b_;
};

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

class LogisticModel final : public Objective::Model {
 public:
  LogisticModel(DenseMatrix a, Vec labels, double reg) : a_(std::move(a)), labels_(std::move(labels)), reg_(reg) {}

  double value(std::span<const double> x) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < a_.rows; ++i) acc += softplus(-labels_[i] * kernels::dot(a_.row(i), x));
    return acc + 0.5 * reg_ * kernels::norm_sq(x);
  }

  void gradient(std::span<const double> x, std::span<double> out) const override {
    std::copy(x.begin(), x.end(), out.begin());
    for (double& o : out) o *= reg_;
    for (std::size_t i = 0; i < a_.rows; ++i) {
      const double margin = labels_[i] * kernels::dot(a_.row(i), x);
      kernels::axpy(-labels_[i] * sigmoid(-margin), a_.row(i), out);
    }
  }

 private:
  DenseMatrix a_;
  Vec labels_;
  double reg_;
};

Objective make_quadratic(const ObjectiveSpec& spec) {
  const DenseMatrix& a = spec.matrix;
  if (a.rows == 0 || a.rows != a.cols) throw ConfigError("quadratic: matrix must be square and non-empty");
  const std::size_t d = a.rows;
  Vec b = spec.vector.empty() ? Vec(d, 0.0) : spec.vector;
  if (b.size() != d) throw ConfigError("quadratic: vector length does not match matrix size");

  const Eigen::MatrixXd m = to_eigen(a);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("quadratic: matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double lmax = lambda.maxCoeff();
  const double lmin = lambda.minCoeff();
  const double tol = 1e-12 * std::max(1.0, std::abs(lmax));
  if (lmin < -tol) {
    std::ostringstream os;
    os << "quadratic: matrix is not positive semidefinite (smallest eigenvalue " << lmin << ")";
    throw ConfigError(os.str());
  }
  if (lmax <= 0.0) throw ConfigError("quadratic: matrix is zero, no positive Lipschitz constant");

  // Minimum-norm minimizer through the pseudo-inverse; exists iff b is in range(A).
  const Eigen::VectorXd eb = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(d));
  Eigen::VectorXd xs;
  if (lmin > tol) {
    xs = m.ldlt().solve(eb);
  } else {
    const Eigen::MatrixXd& v = es.eigenvectors();
    Eigen::VectorXd coeff = v.transpose() * eb;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) = lambda(i) > tol ? coeff(i) / lambda(i) : 0.0;
    xs = v * coeff;
  }
  if ((m * xs - eb).norm() > 1e-9 * (1.0 + eb.norm()))
    throw ConfigError("quadratic: linear term outside the range of the matrix, objective unbounded below");

  Vec minimizer(xs.data(), xs.data() + xs.size());
  auto model = std::make_shared<QuadraticModel>(a, b, minimizer);
  const double f_star = model->value(minimizer);
  return Objective(spec.name.empty() ? "quadratic" : spec.name, d, lmax, std::move(model), std::move(minimizer),
                   f_star);
}

Objective make_log_sum_exp(const ObjectiveSpec& spec) {
  const DenseMatrix& a = spec.matrix;
  if (a.rows == 0 || a.cols == 0) throw ConfigError("log_sum_exp: need at least one row");
  Vec b = spec.vector.empty() ? Vec(a.rows, 0.0) : spec.vector;
  if (b.size() != a.rows) throw ConfigError("log_sum_exp: offsets length must equal number of rows");
  const double lip = largest_eigenvalue_of_gram(a);
  if (!(lip > 0.0)) throw ConfigError("log_sum_exp: rows are all zero");
  return Objective(spec.name.empty() ? "log_sum_exp" : spec.name, a.cols, lip,
                   std::make_shared<LogSumExpModel>(a, std::move(b)));
}

Objective make_logistic(const ObjectiveSpec& spec) {
  if (spec.samples == 0 || spec.features == 0) throw ConfigError("logistic: samples and features must be positive");
  if (!(spec.regularization >= 0.0)) throw ConfigError("logistic: regularization must be non-negative");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix a(spec.samples, spec.features);
  Vec truth(spec.features);
  for (double& w : truth) w = normal(rng);
  for (double& v : a.data) v = normal(rng);
  Vec labels(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const double score = kernels::dot(a.row(i), truth) + 0.5 * normal(rng);
    labels[i] = score >= 0.0 ? 1.0 : -1.0;
  }
  const double lip = largest_eigenvalue_of_gram(a) / 4.0 + spec.regularization;
  if (!(lip > 0.0)) throw ConfigError("logistic: degenerate data");
  return Objective(spec.name.empty() ? "logistic" : spec.name, spec.features, lip,
                   std::make_shared<LogisticModel>(std::move(a), std::move(labels), spec.regularization));
}

}  // namespace

DenseMatrix DenseMatrix::from_rows(const std::vector<Vec>& rows) {
  if (rows.empty()) return {};
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols) throw ConfigError("matrix rows have different lengths");
    std::copy(rows[i].begin(), rows[i].end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
  }
  return m;
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(const Vec& diag) {
  DenseMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Objective::Objective(std::string name, std::size_t dim, double lipschitz, std::shared_ptr<const Model> model,
                     std::optional<Vec> minimizer, std::optional<double> optimal_value)
    : name_(std::move(name)),
      dim_(dim),
      lipschitz_(lipschitz),
      model_(std::move(model)),
      minimizer_(std::move(minimizer)),
      optimal_value_(optimal_value) {
  if (dim_ == 0) throw ConfigError("objective dimension must be positive");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_)) throw ConfigError("Lipschitz constant must be positive");
  if (minimizer_ && minimizer_->size() != dim_) throw ConfigError("minimizer has wrong dimension");
}

Vec Objective::gradient(std::span<const double> x) const {
  Vec g(dim_);
  model_->gradient(x, g);
  return g;
}

double Objective::optimality_gap(std::span<const double> x) const {
  if (!optimal_value_) return std::numeric_limits<double>::quiet_NaN();
  if (!optimal_value_estimated_) {
    if (auto g = model_->exact_gap(x)) return *g;
  }
  return model_->value(x) - *optimal_value_;
}

Objective Objective::with_estimated_optimal_value(double f_star) const {
  Objective copy = *this;
  copy.minimizer_.reset();
  copy.optimal_value_ = f_star;
  copy.optimal_value_estimated_ = true;
  return copy;
}

Builtin parse_builtin(const std::string& id) {
  if (id == "quadratic") return Builtin::quadratic;
  if (id == "log_sum_exp" || id == "log-sum-exp") return Builtin::log_sum_exp;
  if (id == "logistic") return Builtin::logistic;
  throw ConfigError("unknown builtin objective '" + id + "'");
}

std::string builtin_id(Builtin b) {
  switch (b) {
    case Builtin::quadratic: return "quadratic";
    case Builtin::log_sum_exp: return "log_sum_exp";
    case Builtin::logistic: return "logistic";
  }
  return "?";
}

Objective make_objective(const ObjectiveSpec& spec) {
  switch (spec.builtin) {
    case Builtin::quadratic: return make_quadratic(spec);
    case Builtin::log_sum_exp: return make_log_sum_exp(spec);
    case Builtin::logistic: return make_logistic(spec);
  }
  throw ConfigError("unknown builtin objective");
}

ObjectiveSpec preset_spec(const std::string& preset, std::uint64_t seed) {
  ObjectiveSpec spec;
  spec.name = preset;
  spec.seed = seed;
  if (preset == "quadratic-1d") {
    spec.builtin = Builtin::quadratic;
    spec.matrix = DenseMatrix::identity(1);
    spec.vector = {0.0};
  } else if (preset == "quadratic-2d") {
    // Eigenvalues 1 and 4, eigenvectors along the diagonals.
    spec.builtin = Builtin::quadratic;
    spec.matrix = DenseMatrix::from_rows({{2.5, 1.5}, {1.5, 2.5}});
    spec.vector = {1.0, 0.0};
  } else if (preset == "quadratic-ill") {
    spec.builtin = Builtin::quadratic;
    spec.matrix = DenseMatrix::diagonal({1.0, 1e-3});
    spec.vector = {0.0, 0.0};
  } else if (preset == "log-sum-exp") {
    // The origin is interior to the hull of the rows, so a minimizer exists.
    spec.builtin = Builtin::log_sum_exp;
    spec.matrix = DenseMatrix::from_rows({{1.0, 0.0}, {-1.0, 1.0}, {0.0, -1.0}});
    spec.vector = {0.0, 0.5, -0.25};
  } else if (preset == "logistic") {
    spec.builtin = Builtin::logistic;
    spec.samples = 8;
    spec.features = 3;
    spec.regularization = 0.1;
  } else {
    throw ConfigError("unknown objective preset '" + preset + "'");
  }
  return spec;
}

std::vector<std::string> preset_names() {
  return {"quadratic-1d", "quadratic-2d", "quadratic-ill", "log-sum-exp", "logistic"};
}

Vec preset_start(const std::string& preset, std::size_t dim) {
  if (preset == "quadratic-2d") return {-1.0, 1.0};
  return Vec(dim, 1.0);
}

double gradient_check(const Objective& obj, std::span<const double> point, double h) {
  if (!(h > 0.0 && h <= 1e-3)) throw ConfigError("gradient_check: h must lie in (0, 1e-3]");
  if (point.size() != obj.dim()) throw ConfigError("gradient_check: point has wrong dimension");
  const Vec analytic = obj.gradient(point);
  Vec probe(point.begin(), point.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double orig = probe[i];
    probe[i] = orig + h;
    const double fp = obj.value(probe);
    probe[i] = orig - h;
    const double fm = obj.value(probe);
    probe[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm) || !std::isfinite(analytic[i]))
      throw DomainError("non-finite evaluation near point " + format_point(point));
    worst = std::max(worst, std::abs((fp - fm) / (2.0 * h) - analytic[i]));
  }
  return worst;
}

double smoothness_slack(const Objective& obj, std::span<const double> a, std::span<const double> b) {
  const Vec ga = obj.gradient(a);
  const Vec gb = obj.gradient(b);
  Vec diff(a.size());
  kernels::axpby(1.0, b, -1.0, a, diff);
  const double lhs = obj.value(b) - obj.value(a);
  const double rhs = kernels::dot(gb, diff) - kernels::dist_sq(gb, ga) / (2.0 * obj.lipschitz());
  return rhs - lhs;
}

double convexity_slack(const Objective& obj, std::span<const double> a, std::span<const double> b) {
  const Vec ga = obj.gradient(a);
  Vec diff(a.size());
  kernels::axpby(1.0, b, -1.0, a, diff);
  return obj.value(b) - obj.value(a) - kernels::dot(ga, diff);
}

std::vector<Vec> sample_points(const Objective& obj, std::size_t count, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  const Vec center = obj.minimizer().value_or(Vec(obj.dim(), 0.0));
  std::vector<Vec> pts(count, center);
  for (Vec& p : pts)
    for (double& c : p) c += normal(rng);
  return pts;
}

double smoothness_certificate(const Objective& obj, int num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw ConfigError("smoothness_certificate: num_samples must be >= 1");
  const auto pts = sample_points(obj, 2 * static_cast<std::size_t>(num_samples), seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); i += 2) {
    const double slack = smoothness_slack(obj, pts[i], pts[i + 1]);
    if (!std::isfinite(slack)) throw DomainError("non-finite smoothness slack at sample " + std::to_string(i / 2));
    worst = std::min(worst, slack);
  }
  return worst;
}

}  // namespace nag
