#include <doctest.h>

#include <random>

#include "xorland/model.hpp"
#include "xorland/symmetry.hpp"

using namespace xorland;

namespace {

WeightVector random_weights(int nh, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-2, 2);
  const Layout l(nh);
  Vector v(l.dim());
  for (int a = 0; a < l.dim(); ++a) v[a] = u(gen);
  return WeightVector(l, v);
}

}  // namespace

TEST_CASE("permutations and sign flips leave loss and spectrum unchanged") {
  const LossConfig cfg{1e-3, true};
  const WeightVector w = random_weights(4, 1);
  const WeightVector p = flip_hidden(permute_hidden(w, {2, 0, 3, 1}), 1);
  CHECK(loss(p, cfg) == doctest::Approx(loss(w, cfg)).epsilon(1e-14));
  CHECK(rms(gradient(p, cfg)) == doctest::Approx(rms(gradient(w, cfg))).epsilon(1e-10));
  const Vector ew = spectrum(w, cfg).eigenvalues;
  const Vector ep = spectrum(p, cfg).eigenvalues;
  CHECK((ew - ep).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("permute_hidden moves whole units") {
  const WeightVector w = random_weights(3, 2);
  const WeightVector p = permute_hidden(w, {2, 0, 1});
  for (int j = 0; j < 3; ++j) {
    const int src = std::vector<int>{2, 0, 1}[j];
    CHECK(p.bh(j) == w.bh(src));
    CHECK(p.w1(1, j) == w.w1(1, src));
    CHECK(p.w2(j, 0) == w.w2(src, 0));
  }
  CHECK(p.bo(0) == w.bo(0));
  CHECK_THROWS_AS(permute_hidden(w, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(permute_hidden(w, {0, 1, 7}), std::invalid_argument);
}

TEST_CASE("flip_hidden is an involution that negates one unit") {
  const WeightVector w = random_weights(2, 3);
  const WeightVector f = flip_hidden(w, 0);
  CHECK(f.bh(0) == -w.bh(0));
  CHECK(f.w1(0, 0) == -w.w1(0, 0));
  CHECK(f.w2(0, 1) == -w.w2(0, 1));
  CHECK(f.bh(1) == w.bh(1));
  CHECK(flip_hidden(f, 0).values() == w.values());
}

TEST_CASE("canonicalize is constant on an orbit") {
  const WeightVector w = random_weights(4, 4);
  const WeightVector c = canonicalize(w);
  CHECK(canonicalize(c).values() == c.values());
  const WeightVector other = flip_hidden(flip_hidden(permute_hidden(w, {3, 1, 0, 2}), 2), 0);
  CHECK((canonicalize(other).values() - c.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("align_to recovers a hidden symmetry image exactly") {
  const WeightVector w = random_weights(5, 5);
  const WeightVector moved = flip_hidden(permute_hidden(w, {4, 2, 0, 1, 3}), 3);
  const WeightVector back = align_to(moved, w);
  CHECK((back.values() - w.values()).norm() == 0.0);
  CHECK_THROWS_AS(align_to(moved, random_weights(4, 1)), std::invalid_argument);
}
