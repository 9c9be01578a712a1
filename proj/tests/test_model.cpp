#include <doctest.h>

#include <cmath>
#include <random>

#include "reference_net.hpp"
#include "xorland/model.hpp"

using namespace xorland;

namespace {

WeightVector random_weights(int nh, std::mt19937_64& gen, double half = 2.0) {
  std::uniform_real_distribution<double> u(-half, half);
  const Layout layout(nh);
  Vector v(layout.dim());
  for (int a = 0; a < layout.dim(); ++a) v[a] = u(gen);
  return WeightVector(layout, v);
}

std::vector<double> flat(const WeightVector& w) {
  return std::vector<double>(w.values().data(), w.values().data() + w.dim());
}

}  // namespace

TEST_CASE("layout offsets follow the w1, w2, bh, bo order") {
  const Layout l(3);
  CHECK(l.dim() == 17);
  CHECK(l.w1(0, 0) == 0);
  CHECK(l.w1(1, 2) == 5);
  CHECK(l.w2(0, 0) == 6);
  CHECK(l.w2(2, 1) == 11);
  CHECK(l.bh(0) == 12);
  CHECK(l.bo(1) == 16);
  CHECK_THROWS_AS(Layout(0), std::invalid_argument);
}

TEST_CASE("weight vectors reject bad input") {
  CHECK_THROWS_AS(WeightVector(Layout(1), Vector::Zero(6)), std::invalid_argument);
  Vector v = Vector::Zero(7);
  v[2] = std::nan("");
  CHECK_THROWS_AS(WeightVector(Layout(1), v), std::invalid_argument);
  v[2] = INFINITY;
  CHECK_THROWS_AS(WeightVector(Layout(1), v), std::invalid_argument);
}

TEST_CASE("loss matches the reference transcription") {
  std::mt19937_64 gen(11);
  for (int nh : {1, 2, 4, 6}) {
    for (double lambda : {0.0, 1e-6, 1e-2}) {
      for (int rep = 0; rep < 5; ++rep) {
        const WeightVector w = random_weights(nh, gen);
        const long double want = ref::loss(nh, flat(w), lambda);
        CHECK(std::abs(loss(w, {lambda, true}) - static_cast<double>(want)) < 1e-14);
      }
    }
  }
}

TEST_CASE("origin: loss ln 2 and zero gradient") {
  for (int nh = 1; nh <= 6; ++nh) {
    const WeightVector w = WeightVector::zeros(Layout(nh));
    CHECK(std::abs(loss(w, {1e-3, true}) - std::log(2.0)) <= 1e-15);
    CHECK(rms(gradient(w, {1e-3, true})) == 0.0);
  }
}

TEST_CASE("regularizer adds lambda times the squared norm") {
  std::mt19937_64 gen(3);
  const WeightVector w = random_weights(3, gen);
  const double diff = loss(w, {0.25, true}) - loss(w, {0.0, true});
  CHECK(diff == doctest::Approx(0.25 * w.values().squaredNorm()).epsilon(1e-12));
}

TEST_CASE("softmax is stable for large logits") {
  const Pair p = softmax({1000.0, 999.0});
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] + p[1] == doctest::Approx(1.0));
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
}

TEST_CASE("gradient agrees with central differences of the reference loss") {
  std::mt19937_64 gen(5);
  for (int nh : {1, 3}) {
    const WeightVector w = random_weights(nh, gen);
    const Vector g = gradient(w, {1e-2, true});
    const double h = 1e-5;
    for (int a = 0; a < w.dim(); ++a) {
      std::vector<double> p = flat(w), m = flat(w);
      p[a] += h;
      m[a] -= h;
      const long double fd = (ref::loss(nh, p, 1e-2) - ref::loss(nh, m, 1e-2)) / (2 * h);
      CHECK(std::abs(g[a] - static_cast<double>(fd)) < 1e-8);
    }
  }
}

TEST_CASE("hessian is symmetric and agrees with differences of the gradient") {
  std::mt19937_64 gen(8);
  const WeightVector w = random_weights(2, gen);
  const LossConfig cfg{1e-6, true};
  const Matrix hmat = hessian(w, cfg);
  CHECK((hmat - hmat.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  const double h = 1e-5;
  for (int a = 0; a < w.dim(); ++a) {
    Vector p = w.values(), m = w.values();
    p[a] += h;
    m[a] -= h;
    const Vector col = (gradient(WeightVector(w.layout(), p), cfg) -
                        gradient(WeightVector(w.layout(), m), cfg)) /
                       (2 * h);
    CHECK((col - hmat.col(a)).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("origin hessian: weight curvature 2 lambda, output biases 1/4 + 2 lambda") {
  // At W = 0 the hidden activations vanish, so only the output biases see
  // the data term: d2/dbo^2 of the mean cross-entropy at p = 1/2 is 1/4 on
  // the diagonal and -1/4 off it.
  const double lambda = 1e-3;
  const Layout l(2);
  const Matrix hmat = hessian(WeightVector::zeros(l), {lambda, true});
  for (int a = 0; a < l.bo_offset(); ++a) {
    CHECK(hmat(a, a) == doctest::Approx(2 * lambda).epsilon(1e-12));
  }
  CHECK(hmat(l.bo(0), l.bo(0)) == doctest::Approx(0.25 + 2 * lambda));
  CHECK(hmat(l.bo(0), l.bo(1)) == doctest::Approx(-0.25));
  const Spectrum s = spectrum(WeightVector::zeros(l), {lambda, true});
  CHECK(s.index == 0);
  CHECK(s.eigenvalues[s.eigenvalues.size() - 1] == doctest::Approx(0.5 + 2 * lambda));
}

TEST_CASE("spectrum counts negative and zero eigenvalues against the cutoff") {
  Matrix m = Matrix::Zero(4, 4);
  m.diagonal() << -1.0, -5e-10, 2e-10, 3.0;
  const Spectrum s = spectrum_of(m, 1e-9);
  CHECK(s.index == 1);
  CHECK(s.zero_count == 2);
  const Spectrum tight = spectrum_of(m, 1e-10);
  CHECK(tight.index == 2);
  CHECK(tight.zero_count == 0);
  CHECK(s.eigenvalues[0] == -1.0);
  CHECK_THROWS_AS(spectrum_of(m, 0.0), std::invalid_argument);
  CHECK(count_negative(s.eigenvalues, 1e-9) == 1);
  CHECK(count_zero(s.eigenvalues, 1e-9) == 2);
}

TEST_CASE("spectrum eigenvectors reproduce the matrix") {
  std::mt19937_64 gen(2);
  const WeightVector w = random_weights(3, gen);
  const Matrix hmat = hessian(w, {1e-2, true});
  const Spectrum s = spectrum_of(hmat);
  const Matrix back = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
  CHECK((back - hmat).cwiseAbs().maxCoeff() < 1e-10);
  for (int a = 1; a < s.eigenvalues.size(); ++a) CHECK(s.eigenvalues[a - 1] <= s.eigenvalues[a]);
}
