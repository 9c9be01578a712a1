#pragma once

#include "xorland/model.hpp"

namespace xorland {

/// A twice-differentiable scalar surface over R^n. The optimizers, band and
/// eigenvector-following code only ever see this interface, so analytic test
/// surfaces exercise exactly the code path used for the network loss.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual int dim() const = 0;
  virtual double value(const Vector& x) const = 0;
  virtual double value_and_gradient(const Vector& x, Vector& grad) const = 0;
  virtual Matrix hessian(const Vector& x) const = 0;
};

/// Regularized cross-entropy of the XOR network as a Potential.
class XorLoss final : public Potential {
 public:
  XorLoss(Layout layout, LossConfig config) : layout_(layout), config_(config) {}

  int dim() const override { return layout_.dim(); }
  double value(const Vector& x) const override {
    return detail::loss_raw(layout_, x, config_.lambda);
  }
  double value_and_gradient(const Vector& x, Vector& grad) const override {
    return detail::loss_and_gradient_raw(layout_, x, config_.lambda, grad);
  }
  Matrix hessian(const Vector& x) const override {
    return detail::hessian_raw(layout_, x, config_.lambda);
  }

  const Layout& layout() const noexcept { return layout_; }
  const LossConfig& config() const noexcept { return config_; }

 private:
  Layout layout_;
  LossConfig config_;
};

}  // namespace xorland
