#include "xorland/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

namespace xorland {

void MinimizeSettings::validate() const {
  if (!(grad_rms_tol > 0.0)) throw std::invalid_argument("MinimizeSettings: grad_rms_tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("MinimizeSettings: max_iters must be >= 1");
  if (history_size < 1) throw std::invalid_argument("MinimizeSettings: history_size must be >= 1");
  if (!(max_step_norm > 0.0)) throw std::invalid_argument("MinimizeSettings: max_step_norm must be > 0");
}

Vector project_out(const Vector& v, const Vector& unit) { return v - v.dot(unit) * unit; }

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kPolishHandoff = 1e-3;
constexpr int kMaxStalled = 8;

void check_finite(double f, const Vector& g, int iteration) {
  if (!std::isfinite(f) || !g.allFinite()) {
    throw NumericalError("minimize: non-finite loss or gradient at iteration " +
                             std::to_string(iteration),
                         iteration);
  }
}

// Fixed-capacity ring of correction pairs for the two-loop recursion.
class History {
 public:
  History(int capacity, int n) : s_(capacity, Vector(n)), y_(capacity, Vector(n)), rho_(capacity) {}

  void clear() { size_ = 0; }
  bool empty() const { return size_ == 0; }

  void push(const Vector& s, const Vector& y) {
    const int cap = static_cast<int>(s_.size());
    int at = 0;
    if (size_ < cap) {
      at = (head_ + size_) % cap;
      ++size_;
    } else {
      at = head_;  // overwrite the oldest pair
      head_ = (head_ + 1) % cap;
    }
    s_[at] = s;
    y_[at] = y;
    rho_[at] = 1.0 / y.dot(s);
  }

  // Returns -H_k g.
  Vector direction(const Vector& g) const {
    const int cap = static_cast<int>(s_.size());
    Vector q = g;
    std::vector<double> alpha(size_);
    for (int m = size_ - 1; m >= 0; --m) {
      const int at = (head_ + m) % cap;
      alpha[m] = rho_[at] * s_[at].dot(q);
      q -= alpha[m] * y_[at];
    }
    const int last = (head_ + size_ - 1) % cap;
    q *= s_[last].dot(y_[last]) / y_[last].squaredNorm();
    for (int m = 0; m < size_; ++m) {
      const int at = (head_ + m) % cap;
      const double beta = rho_[at] * y_[at].dot(q);
      q += (alpha[m] - beta) * s_[at];
    }
    return -q;
  }

 private:
  std::vector<Vector> s_;
  std::vector<Vector> y_;
  std::vector<double> rho_;
  int head_ = 0;
  int size_ = 0;
};

// Damped Newton iterations on a point already inside a convex basin. Each
// step backtracks until the gradient shrinks and the loss does not rise by
// more than rounding noise. Close to the minimum the true decrease is below
// one ulp of the loss, so a strict test would stall with the soft
// directions still ~1e-8 from their resting place.
void newton_polish(const Potential& potential, LocalMinimum& state, Vector& grad,
                   const MinimizeSettings& settings) {
  Vector trial_grad(potential.dim());
  constexpr double kLossNoise = 16 * std::numeric_limits<double>::epsilon();
  for (int it = 0; it < settings.max_polish_iters; ++it) {
    if (grad.squaredNorm() == 0.0) return;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(potential.hessian(state.x));
    if (solver.info() != Eigen::Success) return;
    if (solver.eigenvalues()[0] <= 0.0) return;
    const Vector coeff = solver.eigenvectors().transpose() * grad;
    Vector step = -(solver.eigenvectors() * coeff.cwiseQuotient(solver.eigenvalues()));
    const double norm = step.norm();
    if (norm > settings.max_step_norm) step *= settings.max_step_norm / norm;
    bool accepted = false;
    for (int bt = 0; bt < 30 && !accepted; ++bt, step *= 0.5) {
      const Vector trial = state.x + step;
      const double f = potential.value_and_gradient(trial, trial_grad);
      check_finite(f, trial_grad, state.iterations);
      const double slack = kLossNoise * std::max(1.0, std::abs(state.value));
      if (f <= state.value + slack && trial_grad.squaredNorm() < grad.squaredNorm()) {
        state.x = trial;
        state.value = f;
        grad = trial_grad;
        accepted = true;
      }
    }
    if (!accepted) return;
    ++state.iterations;
  }
}

}  // namespace

LocalMinimum minimize_potential(const Potential& potential, const Vector& x0,
                                const MinimizeSettings& settings,
                                const Vector* forbidden_direction) {
  settings.validate();
  const int n = potential.dim();
  if (x0.size() != n) throw std::invalid_argument("minimize: dimension mismatch");
  if (!x0.allFinite()) throw NumericalError("minimize: non-finite start point", 0);
  if (forbidden_direction != nullptr &&
      std::abs(forbidden_direction->norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("minimize_projected: forbidden direction must be unit length");
  }
  auto project = [&](Vector& v) {
    if (forbidden_direction != nullptr) v -= v.dot(*forbidden_direction) * *forbidden_direction;
  };

  LocalMinimum state;
  state.x = x0;
  Vector grad(n);
  state.value = potential.value_and_gradient(state.x, grad);
  check_finite(state.value, grad, 0);
  project(grad);
  state.grad_rms = rms(grad);

  History history(settings.history_size, n);
  Vector trial(n);
  Vector trial_grad(n);
  Vector dir(n);
  const bool polish = forbidden_direction == nullptr && settings.newton_polish;
  // With polishing on, LBFGS is driven well past the tolerance so that the
  // Newton phase starts inside the quadratic basin.
  const double target = polish ? settings.grad_rms_tol * kPolishHandoff : settings.grad_rms_tol;
  int iter = 0;
  int stalled = 0;  // consecutive accepted steps that left the loss unchanged
  for (; iter < settings.max_iters && state.grad_rms > target && stalled < kMaxStalled; ++iter) {
    bool steepest = history.empty();
    dir = steepest ? Vector(-grad) : history.direction(grad);
    project(dir);
    if (!steepest && !(dir.dot(grad) < 0.0)) {
      history.clear();
      dir = -grad;
      steepest = true;
    }
    const double norm = dir.norm();
    if (norm > settings.max_step_norm) dir *= settings.max_step_norm / norm;

    double slope = dir.dot(grad);
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      trial = state.x + alpha * dir;
      const double f = potential.value_and_gradient(trial, trial_grad);
      if (std::isfinite(f) && f <= state.value + kArmijo * alpha * slope) {
        check_finite(f, trial_grad, iter + 1);
        project(trial_grad);
        const Vector s = trial - state.x;
        const Vector y = trial_grad - grad;
        if (s.dot(y) > 1e-300) history.push(s, y);
        stalled = f < state.value ? 0 : stalled + 1;
        state.x = trial;
        state.value = f;
        grad = trial_grad;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (steepest) break;  // no descent possible at working precision
      history.clear();
      continue;
    }
    state.grad_rms = rms(grad);
  }
  state.iterations = iter;

  if (polish) {
    newton_polish(potential, state, grad, settings);
  }
  state.grad_rms = rms(grad);
  state.converged = state.grad_rms <= settings.grad_rms_tol;
  return state;
}

MinimizeResult minimize(const WeightVector& w0, const LossConfig& config,
                        const MinimizeSettings& settings) {
  const XorLoss potential(w0.layout(), config);
  LocalMinimum local = minimize_potential(potential, w0.values(), settings);
  return {WeightVector(w0.layout(), std::move(local.x)), local.value, local.grad_rms,
          local.iterations, local.converged};
}

MinimizeResult minimize_projected(const WeightVector& w0, const LossConfig& config,
                                  const MinimizeSettings& settings,
                                  const Vector& forbidden_direction) {
  const XorLoss potential(w0.layout(), config);
  LocalMinimum local = minimize_potential(potential, w0.values(), settings, &forbidden_direction);
  return {WeightVector(w0.layout(), std::move(local.x)), local.value, local.grad_rms,
          local.iterations, local.converged};
}

}  // namespace xorland
