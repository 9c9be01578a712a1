#include "xorland/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include "xorland/union_find.hpp"

namespace xorland {

std::vector<int> DisconnectivityTree::roots() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    if (nodes[i].parent < 0) out.push_back(i);
  }
  return out;
}

int DisconnectivityTree::merge_count() const {
  int count = 0;
  for (const auto& node : nodes) {
    if (node.minimum < 0) count += static_cast<int>(node.children.size()) - 1;
  }
  return count;
}

std::vector<std::vector<int>> DisconnectivityTree::partition_at(double level) const {
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < leaf_count; ++i) {
    if (nodes[i].level > level) continue;
    int at = i;
    while (nodes[at].parent >= 0 && nodes[nodes[at].parent].level <= level) at = nodes[at].parent;
    groups[at].push_back(nodes[i].minimum);
  }
  std::vector<std::vector<int>> out;
  for (auto& [node, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end());
  return out;
}

DisconnectivityTree build_tree(const std::vector<TreeMinimum>& minima,
                               const std::vector<TreeConnection>& connections, double delta_e,
                               double top) {
  if (minima.empty()) throw std::invalid_argument("build_tree: no minima");
  if (!(delta_e > 0.0) || !std::isfinite(delta_e)) {
    throw std::invalid_argument("build_tree: delta_e must be positive");
  }
  constexpr double kMaxThresholds = 1e6;

  std::vector<TreeMinimum> sorted = minima;
  std::sort(sorted.begin(), sorted.end(), [](const TreeMinimum& a, const TreeMinimum& b) {
    return a.loss < b.loss || (a.loss == b.loss && a.id < b.id);
  });
  std::map<int, int> slot;
  for (int s = 0; s < static_cast<int>(sorted.size()); ++s) {
    if (!slot.emplace(sorted[s].id, s).second) {
      throw std::invalid_argument("build_tree: duplicate minimum id " + std::to_string(sorted[s].id));
    }
  }

  DisconnectivityTree tree;
  tree.delta_e = delta_e;
  tree.top = top;
  tree.leaf_count = static_cast<int>(sorted.size());
  for (const auto& m : sorted) {
    TreeNode leaf;
    leaf.level = m.loss;
    leaf.members = {m.id};
    leaf.minimum = m.id;
    tree.nodes.push_back(std::move(leaf));
  }

  const double e_min = sorted.front().loss;
  if ((top - e_min) / delta_e > kMaxThresholds) {
    throw std::invalid_argument("build_tree: more than 1e6 thresholds requested");
  }
  for (long k = 1;; ++k) {
    const double t = e_min + static_cast<double>(k) * delta_e;
    tree.thresholds.push_back(t);
    if (t >= top) break;
  }

  std::vector<TreeConnection> links = connections;
  for (const auto& c : links) {
    if (!slot.count(c.min_a) || !slot.count(c.min_b)) {
      throw std::invalid_argument("build_tree: connection to unknown minimum");
    }
  }
  std::stable_sort(links.begin(), links.end(), [](const TreeConnection& a, const TreeConnection& b) {
    return a.ts_loss < b.ts_loss;
  });

  const int n = tree.leaf_count;
  UnionFind uf(n);
  std::vector<int> current(n);  // top node holding each minimum so far
  for (int s = 0; s < n; ++s) current[s] = s;
  std::size_t next = 0;
  for (double t : tree.thresholds) {
    bool joined = false;
    for (; next < links.size() && links[next].ts_loss <= t; ++next) {
      joined |= uf.unite(slot.at(links[next].min_a), slot.at(links[next].min_b));
    }
    if (!joined) continue;
    // Distinct previous superbasins in every set, in slot order.
    std::map<std::size_t, std::vector<int>> parts;
    for (int s = 0; s < n; ++s) {
      auto& list = parts[uf.find(s)];
      if (std::find(list.begin(), list.end(), current[s]) == list.end()) list.push_back(current[s]);
    }
    std::vector<std::vector<int>> merges;
    for (auto& [root, list] : parts) {
      if (list.size() >= 2) merges.push_back(std::move(list));
    }
    std::sort(merges.begin(), merges.end(), [&](const auto& a, const auto& b) {
      return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    });
    for (auto& children : merges) {
      // Leaves carry slot order; an internal node's first leaf is its lowest.
      auto lowest = [&](int node) {
        const TreeNode& nd = tree.nodes[node];
        return nd.minimum >= 0 ? slot.at(nd.minimum) : slot.at(nd.members.front());
      };
      std::sort(children.begin(), children.end(),
                [&](int a, int b) { return lowest(a) < lowest(b); });
      TreeNode node;
      node.level = t;
      node.children = children;
      const int index = static_cast<int>(tree.nodes.size());
      for (int c : children) {
        tree.nodes[c].parent = index;
        node.members.insert(node.members.end(), tree.nodes[c].members.begin(),
                            tree.nodes[c].members.end());
      }
      // Keep members in slot (loss) order so front() is the lowest minimum.
      std::sort(node.members.begin(), node.members.end(),
                [&](int a, int b) { return slot.at(a) < slot.at(b); });
      for (int id : node.members) current[slot.at(id)] = index;
      tree.nodes.push_back(std::move(node));
    }
  }
  for (auto& node : tree.nodes) {
    if (node.minimum < 0) {
      std::vector<int> ids = node.members;
      std::sort(ids.begin(), ids.end());
      node.members = std::move(ids);
    }
  }
  return tree;
}

DisconnectivityTree build_tree(const LandscapeDB& db, const TreeOptions& options) {
  std::vector<TreeMinimum> minima;
  std::set<int> kept;
  for (const auto& m : db.minima()) {
    if (!options.include_trivial && m.tags.count(kTrivialTag)) continue;
    minima.push_back({m.id, m.loss});
    kept.insert(m.id);
  }
  if (minima.empty()) throw std::invalid_argument("build_tree: database has no minima to draw");
  std::vector<TreeConnection> links;
  double e_min = std::numeric_limits<double>::infinity();
  double e_max = -std::numeric_limits<double>::infinity();
  for (const auto& m : minima) {
    e_min = std::min(e_min, m.loss);
    e_max = std::max(e_max, m.loss);
  }
  double ts_max = -std::numeric_limits<double>::infinity();
  for (const Edge& e : db.edges()) {
    if (!kept.count(e.min_a) || !kept.count(e.min_b)) continue;
    const double loss = db.at(e.ts_id).loss;
    links.push_back({loss, e.min_a, e.min_b});
    ts_max = std::max(ts_max, loss);
  }
  const double top = options.top.value_or(links.empty() ? e_max : ts_max);
  double delta = 0.0;
  if (options.delta_e) {
    delta = *options.delta_e;
  } else {
    const double span = (links.empty() ? e_max : ts_max) - e_min;
    delta = span > 0.0 ? span / 200.0 : std::max(std::abs(e_min), 1.0) * 1e-6;
  }
  return build_tree(minima, links, delta, top);
}

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::string auc_colour(const std::map<int, double>& auc, int id) {
  const auto it = auc.find(id);
  if (it == auc.end()) return "#000000";
  if (it->second >= 1.0 - 1e-9) return "#000000";
  if (std::abs(it->second - 0.75) < 1e-9) return "#d62728";
  if (std::abs(it->second - 0.5) < 1e-9) return "#1f77b4";
  return "#7f7f7f";
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '-': out += "&#45;"; break;  // keeps "--" out of comments
      default: out += c;
    }
  }
  return out;
}

// Horizontal positions: leaves take consecutive slots in depth-first order,
// children are visited by their lowest minimum.
std::vector<double> layout_x(const DisconnectivityTree& tree) {
  std::vector<double> x(tree.nodes.size(), 0.0);
  int slot = 0;
  auto place = [&](auto&& self, int node) -> void {
    const TreeNode& nd = tree.nodes[node];
    if (nd.children.empty()) {
      x[node] = slot++ + 0.5;
      return;
    }
    for (int c : nd.children) self(self, c);
    x[node] = 0.5 * (x[nd.children.front()] + x[nd.children.back()]);
  };
  std::vector<int> roots = tree.roots();
  auto lowest = [&](int node) {
    const TreeNode& nd = tree.nodes[node];
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < tree.leaf_count; ++i) {
      if (std::find(nd.members.begin(), nd.members.end(), tree.nodes[i].minimum) !=
          nd.members.end()) {
        best = std::min(best, tree.nodes[i].level);
      }
    }
    return best;
  };
  std::stable_sort(roots.begin(), roots.end(),
                   [&](int a, int b) { return lowest(a) < lowest(b); });
  for (int r : roots) place(place, r);
  return x;
}

}  // namespace

void render_svg(const DisconnectivityTree& tree, const RenderStyle& style,
                const std::map<int, double>& auc, std::ostream& out) {
  const double margin_x = 60.0;
  const double margin_y = 30.0;
  double e_bottom = std::numeric_limits<double>::infinity();
  double e_top = tree.top;
  for (int i = 0; i < tree.leaf_count; ++i) {
    e_bottom = std::min(e_bottom, tree.nodes[i].level);
    e_top = std::max(e_top, tree.nodes[i].level);
  }
  for (const auto& node : tree.nodes) e_top = std::max(e_top, node.level);
  double span = e_top - e_bottom;
  if (!(span > 0.0)) span = 1.0;
  const double plot_h = style.height - 2.0 * margin_y;
  const double plot_w = style.width - 2.0 * margin_x;
  auto ypx = [&](double e) { return margin_y + (e_top - e) / span * plot_h; };
  const std::vector<double> slots = layout_x(tree);
  const double unit = plot_w / std::max(1, tree.leaf_count);
  auto xpx = [&](int node) { return margin_x + slots[node] * unit; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  out << "<!-- provenance: " << xml_escape(style.provenance.dump()) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << style.width
      << "\" height=\"" << style.height << "\" viewBox=\"0 0 " << style.width << " "
      << style.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  out << "<g stroke-width=\"1.5\" fill=\"none\">\n";
  for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
    const TreeNode& nd = tree.nodes[i];
    const double x0 = xpx(i);
    const double y0 = ypx(nd.level);
    double x1 = x0;
    double y1 = ypx(e_top);
    if (nd.parent >= 0) {
      x1 = xpx(nd.parent);
      y1 = ypx(tree.nodes[nd.parent].level);
    }
    const bool leaf = nd.minimum >= 0;
    const std::string colour = leaf && style.color_by_auc ? auc_colour(auc, nd.minimum) : "#000000";
    out << "<line class=\"" << (leaf ? "leaf" : "branch") << "\" x1=\"" << fmt("%.4f", x0)
        << "\" y1=\"" << fmt("%.6f", y0) << "\" x2=\"" << fmt("%.4f", x1) << "\" y2=\""
        << fmt("%.6f", y1) << "\" stroke=\"" << colour << "\">";
    if (leaf) {
      out << "<title>minimum " << nd.minimum << " loss " << format_double(nd.level);
      const auto it = auc.find(nd.minimum);
      if (it != auc.end()) out << " auc " << format_double(it->second);
      out << "</title>";
    } else {
      out << "<title>merge at " << format_double(nd.level) << "</title>";
    }
    out << "</line>\n";
  }
  out << "</g>\n";
  if (style.scale_bar) {
    const double bar = std::pow(10.0, std::floor(std::log10(span / 4.0)));
    const double x = margin_x / 2.0;
    const double y_low = ypx(e_bottom);
    out << "<g class=\"scale\" stroke=\"#000000\" stroke-width=\"2\">\n";
    out << "<line x1=\"" << fmt("%.4f", x) << "\" y1=\"" << fmt("%.6f", y_low) << "\" x2=\""
        << fmt("%.4f", x) << "\" y2=\"" << fmt("%.6f", ypx(e_bottom + bar)) << "\"/>\n";
    out << "<text x=\"4\" y=\"" << fmt("%.4f", y_low + 16.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\" stroke=\"none\">" << fmt("%.3g", bar)
        << "</text>\n</g>\n";
  }
  out << "</svg>\n";
}

void render_dot(const DisconnectivityTree& tree, const RenderStyle& style,
                const std::map<int, double>& auc, std::ostream& out) {
  out << "// provenance: " << style.provenance.dump() << "\n";
  out << "digraph disconnectivity {\n";
  out << "  node [shape=point];\n";
  for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
    const TreeNode& nd = tree.nodes[i];
    out << "  n" << i << " [";
    if (nd.minimum >= 0) {
      out << "minimum=\"" << nd.minimum << "\", loss=\"" << format_double(nd.level) << "\"";
      const auto it = auc.find(nd.minimum);
      if (it != auc.end()) out << ", auc=\"" << format_double(it->second) << "\"";
    } else {
      out << "level=\"" << format_double(nd.level) << "\"";
    }
    out << "];\n";
  }
  for (int i = 0; i < static_cast<int>(tree.nodes.size()); ++i) {
    for (int c : tree.nodes[i].children) out << "  n" << i << " -> n" << c << ";\n";
  }
  out << "}\n";
}

}  // namespace xorland
