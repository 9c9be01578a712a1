#pragma once

// Analytic test surfaces shared by the optimizer and saddle tests.

#include <array>
#include <cmath>

#include "xorland/potential.hpp"

namespace testpot {

using xorland::Matrix;
using xorland::Vector;

/// 0.5 x'Ax - b'x
class Quadratic final : public xorland::Potential {
 public:
  Quadratic(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {}
  int dim() const override { return static_cast<int>(b_.size()); }
  double value(const Vector& x) const override { return 0.5 * x.dot(a_ * x) - b_.dot(x); }
  double value_and_gradient(const Vector& x, Vector& g) const override {
    g = a_ * x - b_;
    return value(x);
  }
  Matrix hessian(const Vector&) const override { return a_; }

 private:
  Matrix a_;
  Vector b_;
};

class Rosenbrock final : public xorland::Potential {
 public:
  int dim() const override { return 2; }
  double value(const Vector& x) const override {
    return std::pow(1 - x[0], 2) + 100 * std::pow(x[1] - x[0] * x[0], 2);
  }
  double value_and_gradient(const Vector& x, Vector& g) const override {
    g.resize(2);
    g[0] = -2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] * x[0]);
    g[1] = 200 * (x[1] - x[0] * x[0]);
    return value(x);
  }
  Matrix hessian(const Vector& x) const override {
    Matrix h(2, 2);
    h << 2 - 400 * x[1] + 1200 * x[0] * x[0], -400 * x[0], -400 * x[0], 200;
    return h;
  }
};

/// (x0^2 - 1)^2 + sum_{a>0} x_a^2: minima at x0 = +-1, saddle at the origin.
class DoubleWell final : public xorland::Potential {
 public:
  explicit DoubleWell(int dim = 1) : dim_(dim) {}
  int dim() const override { return dim_; }
  double value(const Vector& x) const override {
    double v = std::pow(x[0] * x[0] - 1, 2);
    for (int a = 1; a < dim_; ++a) v += x[a] * x[a];
    return v;
  }
  double value_and_gradient(const Vector& x, Vector& g) const override {
    g.resize(dim_);
    g[0] = 4 * x[0] * (x[0] * x[0] - 1);
    for (int a = 1; a < dim_; ++a) g[a] = 2 * x[a];
    return value(x);
  }
  Matrix hessian(const Vector& x) const override {
    Matrix h = Matrix::Identity(dim_, dim_) * 2.0;
    h(0, 0) = 12 * x[0] * x[0] - 4;
    return h;
  }

 private:
  int dim_;
};

/// The four-Gaussian Mueller-Brown surface.
class MuellerBrown final : public xorland::Potential {
 public:
  int dim() const override { return 2; }
  double value(const Vector& x) const override {
    double v = 0;
    for (int k = 0; k < 4; ++k) v += term(k, x[0], x[1]);
    return v;
  }
  double value_and_gradient(const Vector& x, Vector& g) const override {
    g = Vector::Zero(2);
    double v = 0;
    for (int k = 0; k < 4; ++k) {
      const double e = term(k, x[0], x[1]);
      const double dx = x[0] - X[k], dy = x[1] - Y[k];
      v += e;
      g[0] += e * (2 * a[k] * dx + b[k] * dy);
      g[1] += e * (b[k] * dx + 2 * c[k] * dy);
    }
    return v;
  }
  Matrix hessian(const Vector& x) const override {
    Matrix h = Matrix::Zero(2, 2);
    for (int k = 0; k < 4; ++k) {
      const double e = term(k, x[0], x[1]);
      const double dx = x[0] - X[k], dy = x[1] - Y[k];
      const double px = 2 * a[k] * dx + b[k] * dy;
      const double py = b[k] * dx + 2 * c[k] * dy;
      h(0, 0) += e * (px * px + 2 * a[k]);
      h(1, 1) += e * (py * py + 2 * c[k]);
      h(0, 1) += e * (px * py + b[k]);
    }
    h(1, 0) = h(0, 1);
    return h;
  }

  static constexpr std::array<double, 4> A{-200, -100, -170, 15};
  static constexpr std::array<double, 4> a{-1, -1, -6.5, 0.7};
  static constexpr std::array<double, 4> b{0, 0, 11, 0.6};
  static constexpr std::array<double, 4> c{-10, -10, -6.5, 0.7};
  static constexpr std::array<double, 4> X{1, 0, -0.5, -1};
  static constexpr std::array<double, 4> Y{0, 0.5, 1.5, 1};

 private:
  static double term(int k, double x, double y) {
    const double dx = x - X[k], dy = y - Y[k];
    return A[k] * std::exp(a[k] * dx * dx + b[k] * dx * dy + c[k] * dy * dy);
  }
};

}  // namespace testpot
