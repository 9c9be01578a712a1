#include "xorland/model.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace xorland {

Layout::Layout(int n_hidden) : n_hidden_(n_hidden) {
  if (n_hidden < 1) {
    throw std::invalid_argument("Layout: n_hidden must be positive, got " +
                                std::to_string(n_hidden));
  }
}

WeightVector::WeightVector(Layout layout, Vector values)
    : layout_(layout), values_(std::move(values)) {
  if (values_.size() != layout_.dim()) {
    std::ostringstream msg;
    msg << "WeightVector: expected " << layout_.dim() << " entries for N_h="
        << layout_.n_hidden() << ", got " << values_.size();
    throw std::invalid_argument(msg.str());
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("WeightVector: non-finite entry");
  }
}

WeightVector WeightVector::zeros(Layout layout) {
  return WeightVector(layout, Vector::Zero(layout.dim()));
}

namespace {

// log(1 + e^z) without overflow or cancellation.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Logistic function, accurate in both tails.
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

constexpr int kMaxHidden = 64;

// Plain left-to-right sum. Vectorized reductions pair terms by position, so
// zero-padding a network would change their rounding; this sum is unchanged
// by inserting exact zeros anywhere.
double sum_of_squares(const Vector& w) {
  double s = 0.0;
  for (Eigen::Index a = 0; a < w.size(); ++a) s += w[a] * w[a];
  return s;
}

}  // namespace

namespace detail {

Pair forward_raw(const Layout& layout, const Vector& w, InputPair x) {
  const int nh = layout.n_hidden();
  Pair y{w[layout.bo(0)], w[layout.bo(1)]};
  for (int j = 0; j < nh; ++j) {
    const double h =
        std::tanh(w[layout.bh(j)] + w[layout.w2(j, 0)] * x.x1 + w[layout.w2(j, 1)] * x.x2);
    y[0] += w[layout.w1(0, j)] * h;
    y[1] += w[layout.w1(1, j)] * h;
  }
  return y;
}

double loss_raw(const Layout& layout, const Vector& w, double lambda) {
  double data = 0.0;
  for (int d = 0; d < TrainingSet::kSize; ++d) {
    const Pair y = forward_raw(layout, w, TrainingSet::inputs[d]);
    const int c = TrainingSet::labels[d];
    data += softplus(y[1 - c] - y[c]);
  }
  return data / TrainingSet::kSize + lambda * sum_of_squares(w);
}

double loss_and_gradient_raw(const Layout& layout, const Vector& w, double lambda,
                             Vector& grad) {
  const int nh = layout.n_hidden();
  if (nh > kMaxHidden) throw std::invalid_argument("n_hidden exceeds kernel limit");
  grad.setZero(layout.dim());
  std::array<double, kMaxHidden> h{};
  std::array<double, kMaxHidden> s{};
  double data = 0.0;
  for (int d = 0; d < TrainingSet::kSize; ++d) {
    const InputPair x = TrainingSet::inputs[d];
    const int c = TrainingSet::labels[d];
    Pair y{w[layout.bo(0)], w[layout.bo(1)]};
    for (int j = 0; j < nh; ++j) {
      h[j] = std::tanh(w[layout.bh(j)] + w[layout.w2(j, 0)] * x.x1 + w[layout.w2(j, 1)] * x.x2);
      s[j] = 1.0 - h[j] * h[j];
      y[0] += w[layout.w1(0, j)] * h[j];
      y[1] += w[layout.w1(1, j)] * h[j];
    }
    const double z = y[1 - c] - y[c];
    data += softplus(z);
    // r_i = p_i - [i == c]: -(1/p_c) dp_c/dy_i
    Pair r{};
    r[1 - c] = logistic(z);
    r[c] = -r[1 - c];
    for (int j = 0; j < nh; ++j) {
      grad[layout.w1(0, j)] += r[0] * h[j];
      grad[layout.w1(1, j)] += r[1] * h[j];
      const double back = (r[0] * w[layout.w1(0, j)] + r[1] * w[layout.w1(1, j)]) * s[j];
      grad[layout.w2(j, 0)] += back * x.x1;
      grad[layout.w2(j, 1)] += back * x.x2;
      grad[layout.bh(j)] += back;
    }
    grad[layout.bo(0)] += r[0];
    grad[layout.bo(1)] += r[1];
  }
  grad /= TrainingSet::kSize;
  grad += 2.0 * lambda * w;
  return data / TrainingSet::kSize + lambda * sum_of_squares(w);
}

Matrix hessian_raw(const Layout& layout, const Vector& w, double lambda) {
  const int nh = layout.n_hidden();
  const int n = layout.dim();
  Matrix hess = Matrix::Zero(n, n);
  Vector jdiff(n);  // dy_0/dW - dy_1/dW
  for (int d = 0; d < TrainingSet::kSize; ++d) {
    const InputPair x = TrainingSet::inputs[d];
    const std::array<double, 3> u{x.x1, x.x2, 1.0};
    const int c = TrainingSet::labels[d];
    const Pair y = forward_raw(layout, w, x);
    const Pair p = softmax(y);
    Pair r = p;
    r[c] -= 1.0;

    jdiff.setZero();
    for (int j = 0; j < nh; ++j) {
      const double h = std::tanh(w[layout.bh(j)] + w[layout.w2(j, 0)] * x.x1 +
                                 w[layout.w2(j, 1)] * x.x2);
      const double s = 1.0 - h * h;
      const double ds = -2.0 * h * s;
      const std::array<int, 3> ui{layout.w2(j, 0), layout.w2(j, 1), layout.bh(j)};
      const double w10 = w[layout.w1(0, j)];
      const double w11 = w[layout.w1(1, j)];

      jdiff[layout.w1(0, j)] = h;
      jdiff[layout.w1(1, j)] = -h;
      for (int k = 0; k < 3; ++k) jdiff[ui[k]] = (w10 - w11) * s * u[k];

      // residual-weighted second derivatives of the logits
      for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 3; ++k) {
          const double v = r[i] * s * u[k];
          hess(layout.w1(i, j), ui[k]) += v;
          hess(ui[k], layout.w1(i, j)) += v;
        }
      }
      const double curv = (r[0] * w10 + r[1] * w11) * ds;
      for (int k = 0; k < 3; ++k) {
        for (int m = 0; m < 3; ++m) hess(ui[k], ui[m]) += curv * u[k] * u[m];
      }
    }
    jdiff[layout.bo(0)] = 1.0;
    jdiff[layout.bo(1)] = -1.0;
    // softmax curvature diag(p) - p p^T = p0 p1 (e0 - e1)(e0 - e1)^T
    hess.noalias() += (p[0] * p[1]) * jdiff * jdiff.transpose();
  }
  hess /= TrainingSet::kSize;
  hess.diagonal().array() += 2.0 * lambda;
  return hess;
}

}  // namespace detail

Pair forward(const WeightVector& w, InputPair x) {
  return detail::forward_raw(w.layout(), w.values(), x);
}

Pair softmax(Pair logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  const double sum = e0 + e1;
  return {e0 / sum, e1 / sum};
}

Pair probabilities(const WeightVector& w, InputPair x) { return softmax(forward(w, x)); }

double loss(const WeightVector& w, const LossConfig& config) {
  return detail::loss_raw(w.layout(), w.values(), config.lambda);
}

Vector gradient(const WeightVector& w, const LossConfig& config) {
  Vector g;
  detail::loss_and_gradient_raw(w.layout(), w.values(), config.lambda, g);
  return g;
}

Matrix hessian(const WeightVector& w, const LossConfig& config) {
  return detail::hessian_raw(w.layout(), w.values(), config.lambda);
}

double rms(const Vector& v) {
  return v.size() == 0 ? 0.0 : std::sqrt(v.squaredNorm() / static_cast<double>(v.size()));
}

int count_negative(const Vector& eigenvalues, double zero_cutoff) {
  return static_cast<int>((eigenvalues.array() < -zero_cutoff).count());
}

int count_zero(const Vector& eigenvalues, double zero_cutoff) {
  return static_cast<int>((eigenvalues.array().abs() <= zero_cutoff).count());
}

Spectrum spectrum_of(const Matrix& symmetric, double zero_cutoff) {
  if (!(zero_cutoff > 0.0)) throw std::invalid_argument("spectrum: zero_cutoff must be > 0");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw EigensolveError("spectrum: symmetric eigensolve did not converge", symmetric.sum());
  }
  // Eigen returns eigenvalues in increasing order.
  Spectrum out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  out.index = count_negative(out.eigenvalues, zero_cutoff);
  out.zero_count = count_zero(out.eigenvalues, zero_cutoff);
  return out;
}

Spectrum spectrum(const WeightVector& w, const LossConfig& config, double zero_cutoff) {
  return spectrum_of(hessian(w, config), zero_cutoff);
}

}  // namespace xorland
