#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nag {

using Vec = std::vector<double>;

// Row-major dense matrix. Only used to describe builtin objectives.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  static DenseMatrix from_rows(const std::vector<Vec>& rows);
  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(const Vec& diag);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

// Smooth convex objective with a certified gradient Lipschitz bound.
//
// Immutable after construction; copies share the underlying model and may
// be evaluated concurrently.
class Objective {
 public:
  class Model {
   public:
    virtual ~Model() = default;
    virtual double value(std::span<const double> x) const = 0;
    virtual void gradient(std::span<const double> x, std::span<double> out) const = 0;
    // f(x) - f* evaluated without cancellation, when the model can.
    virtual std::optional<double> exact_gap(std::span<const double>) const { return std::nullopt; }
  };

  Objective(std::string name, std::size_t dim, double lipschitz, std::shared_ptr<const Model> model,
            std::optional<Vec> minimizer = std::nullopt, std::optional<double> optimal_value = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  double lipschitz() const noexcept { return lipschitz_; }
  const std::optional<Vec>& minimizer() const noexcept { return minimizer_; }
  const std::optional<double>& optimal_value() const noexcept { return optimal_value_; }
  // True when optimal_value() came from a long reference run, not a closed form.
  bool optimal_value_estimated() const noexcept { return optimal_value_estimated_; }

  double value(std::span<const double> x) const { return model_->value(x); }
  void gradient(std::span<const double> x, std::span<double> out) const { model_->gradient(x, out); }
  Vec gradient(std::span<const double> x) const;
  // f(x) - f*; NaN when no optimal value is known.
  double optimality_gap(std::span<const double> x) const;

  // Copy carrying an estimated optimal value (minimizer stays unknown).
  Objective with_estimated_optimal_value(double f_star) const;

 private:
  std::string name_;
  std::size_t dim_;
  double lipschitz_;
  std::shared_ptr<const Model> model_;
  std::optional<Vec> minimizer_;
  std::optional<double> optimal_value_;
  bool optimal_value_estimated_ = false;
};

enum class Builtin { quadratic, log_sum_exp, logistic };

// Parameters of a builtin objective.
//   quadratic:   f(x) = 1/2 x'Ax - b'x, A = matrix (symmetric PSD), b = vector
//   log_sum_exp: f(x) = log sum_i exp(a_i'x + b_i), rows of matrix are a_i, vector holds b_i
//   logistic:    f(x) = sum_i log(1 + exp(-l_i a_i'x)) + reg/2 |x|^2 on seeded synthetic
//                data with `samples` rows and `features` columns
struct ObjectiveSpec {
  Builtin builtin = Builtin::quadratic;
  std::string name;
  DenseMatrix matrix;
  Vec vector;
  std::size_t samples = 8;
  std::size_t features = 3;
  double regularization = 0.1;
  std::uint64_t seed = 1;
};

Builtin parse_builtin(const std::string& id);
std::string builtin_id(Builtin b);

Objective make_objective(const ObjectiveSpec& spec);

// Named presets used by the default experiment matrix:
// quadratic-1d, quadratic-2d, quadratic-ill, log-sum-exp, logistic.
ObjectiveSpec preset_spec(const std::string& preset, std::uint64_t seed = 1);
std::vector<std::string> preset_names();
// Starting point used for a preset when the config does not give one.
Vec preset_start(const std::string& preset, std::size_t dim);

// Max over coordinates of |central difference - analytic gradient|.
double gradient_check(const Objective& obj, std::span<const double> point, double h);

// (<grad f(b), b-a> - |grad f(b) - grad f(a)|^2 / 2L) - (f(b) - f(a)); >= 0 for L-smooth convex f.
double smoothness_slack(const Objective& obj, std::span<const double> a, std::span<const double> b);

// f(b) - f(a) - <grad f(a), b-a>; >= 0 for convex f.
double convexity_slack(const Objective& obj, std::span<const double> a, std::span<const double> b);

// Min of smoothness_slack over seeded random pairs. Passes iff >= -1e-10.
double smoothness_certificate(const Objective& obj, int num_samples, std::uint64_t seed);

inline constexpr double kSmoothnessTolerance = 1e-10;

// Seeded sample points around the minimizer (or origin) used by the
// certificate and gradient checks.
std::vector<Vec> sample_points(const Objective& obj, std::size_t count, std::uint64_t seed, double scale = 2.0);

}  // namespace nag
