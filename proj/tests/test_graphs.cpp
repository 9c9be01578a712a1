#include <doctest.h>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/graphviz.hpp>
#include <random>
#include <regex>
#include <sstream>

#include "tree_oracle.hpp"
#include "xorland/graphs.hpp"

using namespace xorland;

TEST_CASE("tree equals the brute-force oracle on random instances") {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const oracle::Instance in = oracle::random_instance(gen);
    const DisconnectivityTree tree = build_tree(in.minima, in.links, in.delta, in.top);
    const oracle::Expected want = oracle::expected_tree(in.minima, in.links, in.delta, in.top);
    INFO("instance ", rep);
    REQUIRE(tree.thresholds == want.thresholds);
    CHECK(tree.merge_count() == want.merge_count);
    CHECK(static_cast<int>(tree.roots().size()) == want.roots);
    std::vector<std::pair<double, std::vector<int>>> got;
    for (const auto& node : tree.nodes) {
      if (node.minimum < 0) got.push_back({node.level, node.members});
    }
    auto key = [](auto& v) { std::sort(v.begin(), v.end()); };
    auto expected = want.merges;
    key(got);
    key(expected);
    CHECK(got == expected);
    for (double t : tree.thresholds) {
      oracle::Partition below;
      for (auto group : oracle::components_at(in.minima, in.links, t)) {
        std::vector<int> kept;
        for (int id : group) {
          for (const auto& m : in.minima) {
            if (m.id == id && m.loss <= t) kept.push_back(id);
          }
        }
        if (!kept.empty()) below.push_back(kept);
      }
      std::sort(below.begin(), below.end());
      CHECK(tree.partition_at(t) == below);
    }
  }
}

TEST_CASE("a three-minimum example by hand") {
  // 1 and 2 join at 0.5, then 3 joins at 0.9.
  const std::vector<TreeMinimum> minima{{1, 0.0}, {2, 0.2}, {3, 0.1}};
  const std::vector<TreeConnection> links{{0.5, 1, 2}, {0.9, 2, 3}};
  const DisconnectivityTree tree = build_tree(minima, links, 0.25, 0.9);
  CHECK(tree.thresholds == std::vector<double>{0.25, 0.5, 0.75, 1.0});
  CHECK(tree.leaf_count == 3);
  CHECK(tree.nodes[0].minimum == 1);
  CHECK(tree.nodes[1].minimum == 3);
  CHECK(tree.nodes[2].minimum == 2);
  REQUIRE(tree.nodes.size() == 5u);
  CHECK(tree.nodes[3].level == 0.5);
  CHECK(tree.nodes[3].members == std::vector<int>{1, 2});
  CHECK(tree.nodes[4].level == 1.0);
  CHECK(tree.nodes[4].members == std::vector<int>{1, 2, 3});
  CHECK(tree.roots() == std::vector<int>{4});
  CHECK(tree.merge_count() == 2);
  CHECK(tree.partition_at(0.3) == oracle::Partition{{1}, {2}, {3}});
  CHECK(tree.partition_at(0.05) == oracle::Partition{{1}});
}

TEST_CASE("build_tree input errors") {
  CHECK_THROWS_AS(build_tree({}, {}, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_tree({{1, 0.0}}, {}, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_tree({{1, 0.0}, {1, 0.2}}, {}, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_tree({{1, 0.0}}, {{0.5, 1, 9}}, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_tree({{1, 0.0}}, {}, 1e-9, 1.0), std::invalid_argument);
}

namespace {

DisconnectivityTree sample_tree() {
  const std::vector<TreeMinimum> minima{{4, 0.3}, {7, 0.1}, {9, 0.2}, {11, 0.6}};
  const std::vector<TreeConnection> links{{0.35, 4, 9}, {0.5, 7, 9}, {0.8, 11, 4}};
  return build_tree(minima, links, 0.05, 0.8);
}

}  // namespace

TEST_CASE("SVG has one leaf line per minimum and embeds provenance") {
  const DisconnectivityTree tree = sample_tree();
  RenderStyle style;
  style.provenance = {{"seed", 5}, {"note", "a--b"}};
  std::ostringstream svg;
  render_svg(tree, style, {{4, 1.0}, {7, 0.75}, {9, 0.5}, {11, 1.0}}, svg);
  const std::string text = svg.str();
  CHECK(text.rfind("<?xml", 0) == 0);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(text.find("<!-- provenance:") != std::string::npos);
  // No "--" may appear inside an XML comment.
  const auto open = text.find("<!--");
  const auto close = text.find("-->", open);
  CHECK(text.substr(open + 4, close - open - 4).find("--") == std::string::npos);
  const std::regex leaf("<line class=\"leaf\"");
  const auto n = std::distance(std::sregex_iterator(text.begin(), text.end(), leaf), std::sregex_iterator());
  CHECK(n == 4);
  CHECK(text.find("#d62728") != std::string::npos);
  CHECK(text.find("#1f77b4") != std::string::npos);
}

TEST_CASE("single minimum renders as one branch") {
  const DisconnectivityTree tree = build_tree({{0, 0.4}}, {}, 0.01, 0.4);
  std::ostringstream svg;
  render_svg(tree, {}, {{0, 1.0}}, svg);
  const std::string text = svg.str();
  const std::regex line("<line class=\"(leaf|branch)\"");
  CHECK(std::distance(std::sregex_iterator(text.begin(), text.end(), line), std::sregex_iterator()) == 1);
}

TEST_CASE("DOT output parses back with Boost.Graph") {
  const DisconnectivityTree tree = sample_tree();
  RenderStyle style;
  style.provenance = {{"seed", 1}};
  std::ostringstream dot;
  render_dot(tree, style, {{4, 1.0}, {7, 0.75}, {9, 0.5}, {11, 1.0}}, dot);

  using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS,
                                      boost::property<boost::vertex_name_t, std::string>>;
  Graph g;
  boost::dynamic_properties dp(boost::ignore_other_properties);
  dp.property("node_id", boost::get(boost::vertex_name, g));
  std::map<Graph::vertex_descriptor, std::string> loss, level, minimum, auc_attr;
  dp.property("loss", boost::make_assoc_property_map(loss));
  dp.property("level", boost::make_assoc_property_map(level));
  dp.property("minimum", boost::make_assoc_property_map(minimum));
  dp.property("auc", boost::make_assoc_property_map(auc_attr));
  std::istringstream in(dot.str());
  REQUIRE(boost::read_graphviz(in, g, dp));
  CHECK(boost::num_vertices(g) == tree.nodes.size());
  CHECK(boost::num_edges(g) == tree.nodes.size() - tree.roots().size());
  int leaves = 0;
  for (auto [v, end] = boost::vertices(g); v != end; ++v) {
    if (minimum.count(*v) && !minimum[*v].empty()) {
      ++leaves;
      CHECK(loss.count(*v));
      CHECK(auc_attr.count(*v));
    } else {
      CHECK(level.count(*v));
    }
  }
  CHECK(leaves == tree.leaf_count);
}

TEST_CASE("database tree leaves out the trivial minimum by default") {
  DbMeta meta;
  meta.n_hidden = 1;
  meta.lambda = 1e-3;
  LandscapeDB db(meta);
  db.insert_dedupe(characterize(WeightVector::zeros(Layout(1)), {1e-3, true}));
  CHECK_THROWS_AS(build_tree(db), std::invalid_argument);
  TreeOptions o;
  o.include_trivial = true;
  const DisconnectivityTree tree = build_tree(db, o);
  CHECK(tree.leaf_count == 1);
}
