#include "xorland/symmetry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace xorland {

namespace {

// Incoming and outgoing weights of one hidden unit, in a fixed order.
std::array<double, 5> unit_weights(const WeightVector& w, int j) {
  return {w.w2(j, 0), w.w2(j, 1), w.bh(j), w.w1(0, j), w.w1(1, j)};
}

}  // namespace

WeightVector permute_hidden(const WeightVector& w, const std::vector<int>& perm) {
  const Layout& layout = w.layout();
  const int nh = layout.n_hidden();
  if (static_cast<int>(perm.size()) != nh) {
    throw std::invalid_argument("permute_hidden: permutation size mismatch");
  }
  Vector out = w.values();
  for (int j = 0; j < nh; ++j) {
    const int src = perm[j];
    if (src < 0 || src >= nh) throw std::invalid_argument("permute_hidden: bad index");
    for (int i = 0; i < 2; ++i) out[layout.w1(i, j)] = w.w1(i, src);
    for (int k = 0; k < 2; ++k) out[layout.w2(j, k)] = w.w2(src, k);
    out[layout.bh(j)] = w.bh(src);
  }
  return WeightVector(layout, std::move(out));
}

WeightVector flip_hidden(const WeightVector& w, int j) {
  const Layout& layout = w.layout();
  Vector out = w.values();
  for (int i = 0; i < 2; ++i) out[layout.w1(i, j)] = -out[layout.w1(i, j)];
  for (int k = 0; k < 2; ++k) out[layout.w2(j, k)] = -out[layout.w2(j, k)];
  out[layout.bh(j)] = -out[layout.bh(j)];
  return WeightVector(layout, std::move(out));
}

WeightVector canonicalize(const WeightVector& w) {
  constexpr double kNegligible = 1e-10;
  const int nh = w.layout().n_hidden();
  WeightVector out = w;
  for (int j = 0; j < nh; ++j) {
    const auto u = unit_weights(out, j);
    for (double v : u) {
      if (std::abs(v) > kNegligible) {
        if (v < 0.0) out = flip_hidden(out, j);
        break;
      }
    }
  }
  std::vector<int> perm(nh);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    const std::array<double, 3> ka{out.bh(a), out.w2(a, 0), out.w2(a, 1)};
    const std::array<double, 3> kb{out.bh(b), out.w2(b, 0), out.w2(b, 1)};
    return ka > kb;
  });
  return permute_hidden(out, perm);
}

WeightVector align_to(const WeightVector& w, const WeightVector& reference) {
  if (!(w.layout() == reference.layout())) {
    throw std::invalid_argument("align_to: layout mismatch");
  }
  const int nh = w.layout().n_hidden();
  if (nh > 8) throw std::invalid_argument("align_to: exhaustive alignment limited to N_h <= 8");

  // cost[j][m]: squared distance of reference unit j to unit m of w under the
  // better of the two signs.
  std::vector<std::vector<double>> cost(nh, std::vector<double>(nh));
  std::vector<std::vector<bool>> flip(nh, std::vector<bool>(nh));
  for (int j = 0; j < nh; ++j) {
    const auto r = unit_weights(reference, j);
    for (int m = 0; m < nh; ++m) {
      const auto u = unit_weights(w, m);
      double plus = 0.0;
      double minus = 0.0;
      for (int a = 0; a < 5; ++a) {
        plus += (r[a] - u[a]) * (r[a] - u[a]);
        minus += (r[a] + u[a]) * (r[a] + u[a]);
      }
      cost[j][m] = std::min(plus, minus);
      flip[j][m] = minus < plus;
    }
  }

  std::vector<int> perm(nh);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int j = 0; j < nh && c < best_cost; ++j) c += cost[j][perm[j]];
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  WeightVector out = permute_hidden(w, best);
  for (int j = 0; j < nh; ++j) {
    if (flip[j][best[j]]) out = flip_hidden(out, j);
  }
  return out;
}

}  // namespace xorland
