#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "xorland/model.hpp"
#include "xorland/potential.hpp"

namespace xorland {

struct MinimizeSettings {
  double grad_rms_tol = 1e-9;
  int max_iters = 20000;
  int history_size = 10;
  double max_step_norm = 0.5;
  /// Finish with Newton steps on the analytic Hessian once LBFGS stops. Only
  /// steps that lower both the loss and the gradient are taken.
  bool newton_polish = true;
  int max_polish_iters = 12;

  void validate() const;
};

/// Raised when a non-finite value appears during minimization.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Outcome of a local minimization on an arbitrary Potential.
struct LocalMinimum {
  Vector x;
  double value = 0.0;
  double grad_rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct MinimizeResult {
  WeightVector w = WeightVector::zeros(Layout(1));
  double loss = 0.0;
  double grad_rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// LBFGS with backtracking (sufficient-decrease) line search and a step-norm
/// cap. The loss never increases across accepted steps. When
/// `forbidden_direction` is given, search steps and the convergence test use
/// the gradient projected orthogonal to it, and no Newton polish is applied.
LocalMinimum minimize_potential(const Potential& potential, const Vector& x0,
                                const MinimizeSettings& settings,
                                const Vector* forbidden_direction = nullptr);

MinimizeResult minimize(const WeightVector& w0, const LossConfig& config,
                        const MinimizeSettings& settings = {});

MinimizeResult minimize_projected(const WeightVector& w0, const LossConfig& config,
                                  const MinimizeSettings& settings,
                                  const Vector& forbidden_direction);

/// v - (v . u) u for unit u.
Vector project_out(const Vector& v, const Vector& unit);

}  // namespace xorland
