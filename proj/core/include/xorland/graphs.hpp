#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xorland/database.hpp"

namespace xorland {

/// Input to the superbasin analysis, decoupled from the database so that
/// synthetic instances can be built directly.
struct TreeMinimum {
  int id = -1;
  double loss = 0.0;
};

struct TreeConnection {
  double ts_loss = 0.0;
  int min_a = -1;
  int min_b = -1;
};

struct TreeNode {
  double level = 0.0;        // leaf: loss of the minimum; internal: merge threshold
  std::vector<int> members;  // minima ids, ascending
  std::vector<int> children; // indices into DisconnectivityTree::nodes
  int minimum = -1;          // minimum id for leaves, -1 otherwise
  int parent = -1;
};

struct DisconnectivityTree {
  std::vector<double> thresholds;  // ascending
  double delta_e = 0.0;
  double top = 0.0;
  std::vector<TreeNode> nodes;     // leaves first (ascending loss, then id)
  int leaf_count = 0;

  std::vector<int> roots() const;
  /// Pairwise merges: a node joining k superbasins counts k - 1.
  int merge_count() const;
  /// Superbasins at `level`: each group holds the minima below `level` that
  /// are joined by transition states not above it. Groups ascending.
  std::vector<std::vector<int>> partition_at(double level) const;
};

/// Thresholds E_min + k * delta_e for k = 1, 2, ... up to the first one at or
/// above `top`. At each threshold, minima joined through a transition state
/// with loss <= threshold are united; a node is created wherever two or more
/// previous superbasins meet.
DisconnectivityTree build_tree(const std::vector<TreeMinimum>& minima,
                               const std::vector<TreeConnection>& connections, double delta_e,
                               double top);

struct TreeOptions {
  std::optional<double> delta_e;  // default: (E_max_ts - E_global_min) / 200
  std::optional<double> top;      // default: highest transition state
  bool include_trivial = false;
};

/// Tree over the minima and edges of a database. Minima tagged trivial and
/// their edges are left out unless include_trivial is set.
DisconnectivityTree build_tree(const LandscapeDB& db, const TreeOptions& options = {});

struct RenderStyle {
  int width = 800;
  int height = 600;
  bool color_by_auc = true;
  bool scale_bar = true;
  nlohmann::json provenance = nlohmann::json::object();
};

/// SVG 1.1 drawing: loss on the vertical axis, each leaf ends at its
/// minimum's loss, subtrees get horizontal space in proportion to their leaf
/// count with children ordered by their lowest minimum. `auc` maps minimum
/// ids to AUC values for branch colouring.
void render_svg(const DisconnectivityTree& tree, const RenderStyle& style,
                const std::map<int, double>& auc, std::ostream& out);

/// Graphviz description with one node per tree node (attributes `loss`,
/// `auc` for leaves, `level` for merges) and one edge per parent link.
void render_dot(const DisconnectivityTree& tree, const RenderStyle& style,
                const std::map<int, double>& auc, std::ostream& out);

}  // namespace xorland
