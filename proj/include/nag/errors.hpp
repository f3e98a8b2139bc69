#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nag {

// Bad parameters: unknown builtin, non-PSD matrix, s > 1/L, ...
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A function or formula evaluated outside its domain (t <= 0, Lyapunov pole,
// non-finite objective value).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A quantity that needs the minimizer was requested for an objective that
// does not know it.
class MissingMinimizerError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Iterates left the finite range or exceeded the divergence guard.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t k, const std::string& what)
      : std::runtime_error("diverged at k=" + std::to_string(k) + ": " + what), k_(k) {}
  std::size_t k() const noexcept { return k_; }

 private:
  std::size_t k_;
};

// Adaptive step size collapsed.
class StiffnessError : public std::runtime_error {
 public:
  StiffnessError(double t, const std::string& what) : std::runtime_error(what), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace nag
