#pragma once

// Brute-force superbasin oracle: at every threshold, components are
// recomputed from scratch by label propagation over all connections whose
// transition state lies at or below the threshold.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "xorland/graphs.hpp"

namespace oracle {

using Partition = std::vector<std::vector<int>>;  // sorted groups of ids, sorted

inline Partition components_at(const std::vector<xorland::TreeMinimum>& minima,
                               const std::vector<xorland::TreeConnection>& links, double t) {
  std::map<int, int> label;
  for (const auto& m : minima) label[m.id] = m.id;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : links) {
      if (c.ts_loss > t) continue;
      const int lo = std::min(label[c.min_a], label[c.min_b]);
      if (label[c.min_a] != lo || label[c.min_b] != lo) {
        // Relabel both whole groups.
        const int ha = label[c.min_a], hb = label[c.min_b];
        for (auto& [id, l] : label) {
          if (l == ha || l == hb) l = lo;
        }
        changed = true;
      }
    }
  }
  std::map<int, std::vector<int>> groups;
  for (const auto& [id, l] : label) groups[l].push_back(id);
  Partition out;
  for (auto& [l, ids] : groups) out.push_back(ids);
  std::sort(out.begin(), out.end());
  return out;
}

struct Expected {
  std::vector<double> thresholds;
  std::vector<std::pair<double, std::vector<int>>> merges;  // (level, members) per merge node
  int merge_count = 0;
  int roots = 0;
};

inline Expected expected_tree(const std::vector<xorland::TreeMinimum>& minima,
                              const std::vector<xorland::TreeConnection>& links, double delta,
                              double top) {
  Expected e;
  double e_min = minima.front().loss;
  for (const auto& m : minima) e_min = std::min(e_min, m.loss);
  for (long k = 1;; ++k) {
    const double t = e_min + static_cast<double>(k) * delta;
    e.thresholds.push_back(t);
    if (t >= top) break;
  }
  Partition prev;
  for (const auto& m : minima) prev.push_back({m.id});
  std::sort(prev.begin(), prev.end());
  for (double t : e.thresholds) {
    const Partition now = components_at(minima, links, t);
    for (const auto& group : now) {
      int parts = 0;
      for (const auto& p : prev) {
        if (std::includes(group.begin(), group.end(), p.begin(), p.end())) ++parts;
      }
      if (parts >= 2) {
        e.merges.push_back({t, group});
        e.merge_count += parts - 1;
      }
    }
    prev = now;
  }
  e.roots = static_cast<int>(prev.size());
  return e;
}

struct Instance {
  std::vector<xorland::TreeMinimum> minima;
  std::vector<xorland::TreeConnection> links;
  double delta = 0.0;
  double top = 0.0;
};

inline Instance random_instance(std::mt19937_64& gen) {
  Instance in;
  std::uniform_int_distribution<int> nmin(1, 12), nts(0, 30);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = nmin(gen);
  for (int k = 0; k < n; ++k) {
    // Coarse losses so that ties occur.
    in.minima.push_back({3 * k + 1, std::round(u(gen) * 20) / 20});
  }
  const int m = n > 1 ? nts(gen) : 0;
  double top = 0.0;
  for (int k = 0; k < m; ++k) {
    const auto& a = in.minima[gen() % n];
    const auto& b = in.minima[gen() % n];
    if (a.id == b.id) continue;
    const double ts = std::max(a.loss, b.loss) + u(gen) * 0.5;
    in.links.push_back({ts, a.id, b.id});
    top = std::max(top, ts);
  }
  in.delta = 0.01 + u(gen) * 0.1;
  in.top = in.links.empty() ? 1.0 : top;
  return in;
}


/// Merge nodes of a built tree as (level, members), sorted.
inline std::vector<std::pair<double, std::vector<int>>> merges_of(
    const xorland::DisconnectivityTree& tree) {
  std::vector<std::pair<double, std::vector<int>>> got;
  for (const auto& node : tree.nodes) {
    if (node.minimum < 0) got.push_back({node.level, node.members});
  }
  std::sort(got.begin(), got.end());
  return got;
}

inline bool tree_matches(const xorland::DisconnectivityTree& tree, Expected want) {
  std::sort(want.merges.begin(), want.merges.end());
  return tree.thresholds == want.thresholds && tree.merge_count() == want.merge_count &&
         static_cast<int>(tree.roots().size()) == want.roots && merges_of(tree) == want.merges;
}

}  // namespace oracle
