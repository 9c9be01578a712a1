#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace xorland {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Default cutoff below which a Hessian eigenvalue counts as zero.
inline constexpr double kDefaultZeroCutoff = 1e-9;
/// Tighter cutoff used when re-verifying stored stationary points.
inline constexpr double kVerifyZeroCutoff = 1e-10;

/// Flat parameter layout for a 2-input, N_h-hidden, 2-output tanh network.
///
/// The four weight classes are stored contiguously in the fixed order
/// (w1, w2, bh, bo), each row-major:
///   w1[i][j]  output i <- hidden j   (2 x N_h)
///   w2[j][k]  hidden j <- input k    (N_h x 2)
///   bh[j]     hidden biases          (N_h)
///   bo[i]     output biases          (2)
class Layout {
 public:
  explicit Layout(int n_hidden);

  int n_hidden() const noexcept { return n_hidden_; }
  int dim() const noexcept { return 5 * n_hidden_ + 2; }

  int w1_offset() const noexcept { return 0; }
  int w2_offset() const noexcept { return 2 * n_hidden_; }
  int bh_offset() const noexcept { return 4 * n_hidden_; }
  int bo_offset() const noexcept { return 5 * n_hidden_; }

  int w1(int i, int j) const noexcept { return i * n_hidden_ + j; }
  int w2(int j, int k) const noexcept { return w2_offset() + 2 * j + k; }
  int bh(int j) const noexcept { return bh_offset() + j; }
  int bo(int i) const noexcept { return bo_offset() + i; }

  friend bool operator==(const Layout&, const Layout&) = default;

 private:
  int n_hidden_;
};

/// Network parameters; every entry is finite.
class WeightVector {
 public:
  WeightVector(Layout layout, Vector values);

  static WeightVector zeros(Layout layout);

  const Layout& layout() const noexcept { return layout_; }
  const Vector& values() const noexcept { return values_; }
  int dim() const noexcept { return layout_.dim(); }
  double operator[](int a) const { return values_[a]; }

  double w1(int i, int j) const { return values_[layout_.w1(i, j)]; }
  double w2(int j, int k) const { return values_[layout_.w2(j, k)]; }
  double bh(int j) const { return values_[layout_.bh(j)]; }
  double bo(int i) const { return values_[layout_.bo(i)]; }

 private:
  Layout layout_;
  Vector values_;
};

struct InputPair {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// The four XOR patterns and their class labels.
struct TrainingSet {
  static constexpr int kSize = 4;
  static constexpr std::array<InputPair, kSize> inputs{
      {{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}};
  static constexpr std::array<int, kSize> labels{0, 1, 1, 0};
};

struct LossConfig {
  double lambda = 0.0;
  bool regularize_all = true;
};

using Pair = std::array<double, 2>;

Pair forward(const WeightVector& w, InputPair x);
Pair softmax(Pair logits);
Pair probabilities(const WeightVector& w, InputPair x);

double loss(const WeightVector& w, const LossConfig& config);
Vector gradient(const WeightVector& w, const LossConfig& config);
Matrix hessian(const WeightVector& w, const LossConfig& config);

/// Root-mean-square of a vector's entries.
double rms(const Vector& v);

/// Ascending Hessian eigen-decomposition plus index classification.
struct Spectrum {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column a pairs with eigenvalues[a]
  int index = 0;        // count of eigenvalues < -zero_cutoff
  int zero_count = 0;   // count with |eigenvalue| <= zero_cutoff
};

/// Thrown when the symmetric eigensolver fails; carries a checksum of the input.
class EigensolveError : public std::runtime_error {
 public:
  EigensolveError(const std::string& what, double checksum)
      : std::runtime_error(what), checksum_(checksum) {}
  double checksum() const noexcept { return checksum_; }

 private:
  double checksum_;
};

Spectrum spectrum_of(const Matrix& symmetric, double zero_cutoff = kDefaultZeroCutoff);
Spectrum spectrum(const WeightVector& w, const LossConfig& config,
                  double zero_cutoff = kDefaultZeroCutoff);

/// Counts of an ascending eigenvalue list against a cutoff.
int count_negative(const Vector& eigenvalues, double zero_cutoff);
int count_zero(const Vector& eigenvalues, double zero_cutoff);

namespace detail {

// Unchecked kernels on raw parameter vectors; the public functions above and
// the XorLoss potential both route through these.
double loss_raw(const Layout& layout, const Vector& w, double lambda);
double loss_and_gradient_raw(const Layout& layout, const Vector& w, double lambda,
                             Vector& grad);
Matrix hessian_raw(const Layout& layout, const Vector& w, double lambda);
Pair forward_raw(const Layout& layout, const Vector& w, InputPair x);

}  // namespace detail

}  // namespace xorland
