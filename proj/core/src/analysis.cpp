#include "xorland/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "xorland/parallel.hpp"

namespace xorland {

std::array<double, TrainingSet::kSize> correct_class_probabilities(const WeightVector& w) {
  std::array<double, TrainingSet::kSize> out{};
  for (int d = 0; d < TrainingSet::kSize; ++d) {
    out[d] = probabilities(w, TrainingSet::inputs[d])[TrainingSet::labels[d]];
  }
  return out;
}

double auc(const WeightVector& w, double tie_tolerance) {
  std::array<double, TrainingSet::kSize> score{};
  for (int d = 0; d < TrainingSet::kSize; ++d) {
    score[d] = probabilities(w, TrainingSet::inputs[d])[1];
  }
  double wins = 0.0;
  int pairs = 0;
  for (int p = 0; p < TrainingSet::kSize; ++p) {
    if (TrainingSet::labels[p] != 1) continue;
    for (int q = 0; q < TrainingSet::kSize; ++q) {
      if (TrainingSet::labels[q] != 0) continue;
      ++pairs;
      const double diff = score[p] - score[q];
      if (std::abs(diff) <= tie_tolerance) {
        wins += 0.5;
      } else if (diff > 0.0) {
        wins += 1.0;
      }
    }
  }
  return wins / pairs;
}

SparsityMask sparsity(const WeightVector& w, double edge_threshold) {
  const Layout& layout = w.layout();
  const int nh = layout.n_hidden();
  SparsityMask mask;
  mask.weight_nonzero.resize(layout.dim());
  for (int a = 0; a < layout.dim(); ++a) {
    mask.weight_nonzero[a] = std::abs(w[a]) > edge_threshold;
    mask.zero_weights += !mask.weight_nonzero[a];
  }
  mask.node_connected.resize(nh);
  for (int j = 0; j < nh; ++j) {
    bool on = false;
    for (int i = 0; i < 2; ++i) on = on || mask.weight_nonzero[layout.w1(i, j)];
    for (int k = 0; k < 2; ++k) on = on || mask.weight_nonzero[layout.w2(j, k)];
    mask.node_connected[j] = on;
    mask.connected_count += on;
  }
  return mask;
}

nlohmann::json to_json(const SparsityMask& mask) {
  nlohmann::json j;
  j["connected_count"] = mask.connected_count;
  j["zero_weights"] = mask.zero_weights;
  j["node_connected"] = mask.node_connected;
  j["weight_nonzero"] = mask.weight_nonzero;
  return j;
}

std::string to_string(MinimumQuality quality) {
  switch (quality) {
    case MinimumQuality::good: return "good";
    case MinimumQuality::bad: return "bad";
    case MinimumQuality::suboptimal: return "suboptimal";
  }
  return "unknown";
}

MinimumQuality classify(const WeightVector& w, double edge_threshold) {
  if (auc(w) < 1.0) return MinimumQuality::bad;
  if (sparsity(w, edge_threshold).connected_count > 3) return MinimumQuality::suboptimal;
  return MinimumQuality::good;
}

SensitivityGrid sensitivity(const WeightVector& w, int threads) {
  constexpr int n = SensitivityGrid::kSamples;
  SensitivityGrid grid;
  grid.p1.resize(n * n);
  grid.label.resize(n * n);
  parallel_for(n, threads, [&](int row) {
    const double y = SensitivityGrid::coordinate(row);
    for (int col = 0; col < n; ++col) {
      const Pair p = probabilities(w, {SensitivityGrid::coordinate(col), y});
      grid.p1[row * n + col] = p[1];
      grid.label[row * n + col] = p[1] > p[0] ? 1 : 0;
    }
  });
  return grid;
}

int robust_label(double x, double y) { return std::abs(x - y) <= 0.5 ? 0 : 1; }

double robustness_score(const SensitivityGrid& grid) {
  constexpr int n = SensitivityGrid::kSamples;
  int hits = 0;
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const int want = robust_label(SensitivityGrid::coordinate(col), SensitivityGrid::coordinate(row));
      hits += grid.label_at(row, col) == want;
    }
  }
  return static_cast<double>(hits) / (n * n);
}

void write_csv(const SensitivityGrid& grid, const nlohmann::json& provenance, std::ostream& out) {
  constexpr int n = SensitivityGrid::kSamples;
  out << "# provenance: " << provenance.dump() << "\n";
  out << "x,y,p1,class\n";
  char buf[96];
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f,", SensitivityGrid::coordinate(col),
                    SensitivityGrid::coordinate(row));
      out << buf << format_double(grid.p1_at(row, col)) << "," << grid.label_at(row, col) << "\n";
    }
  }
}

void write_pgm(const SensitivityGrid& grid, const nlohmann::json& provenance, std::ostream& out) {
  constexpr int n = SensitivityGrid::kSamples;
  out << "P5\n# provenance: " << provenance.dump() << "\n" << n << " " << n << "\n255\n";
  for (int row = n - 1; row >= 0; --row) {
    for (int col = 0; col < n; ++col) {
      const long v = std::lround(255.0 * grid.p1_at(row, col));
      out.put(static_cast<char>(static_cast<unsigned char>(std::clamp(v, 0L, 255L))));
    }
  }
}

WeightVector embed(const WeightVector& w) {
  const Layout from = w.layout();
  const Layout to(from.n_hidden() + 1);
  Vector out = Vector::Zero(to.dim());
  for (int j = 0; j < from.n_hidden(); ++j) {
    for (int i = 0; i < 2; ++i) out[to.w1(i, j)] = w.w1(i, j);
    for (int k = 0; k < 2; ++k) out[to.w2(j, k)] = w.w2(j, k);
    out[to.bh(j)] = w.bh(j);
  }
  for (int i = 0; i < 2; ++i) out[to.bo(i)] = w.bo(i);
  return WeightVector(to, std::move(out));
}

WeightVector embed_to(const WeightVector& w, int nh_target) {
  if (nh_target < w.layout().n_hidden()) {
    throw std::invalid_argument("embed_to: target has fewer hidden units than the source");
  }
  WeightVector out = w;
  while (out.layout().n_hidden() < nh_target) out = embed(out);
  return out;
}

EmbeddingReport embedding_report(const WeightVector& w, const LossConfig& config, int nh_target,
                                 double zero_cutoff) {
  EmbeddingReport r;
  r.lambda = config.lambda;
  r.nh_from = w.layout().n_hidden();
  r.nh_to = nh_target;
  r.loss_before = loss(w, config);
  r.index_before = spectrum(w, config, zero_cutoff).index;
  const WeightVector big = embed_to(w, nh_target);
  r.loss_after = loss(big, config);
  r.grad_rms_after = rms(gradient(big, config));
  const Spectrum spec = spectrum(big, config, zero_cutoff);
  r.index_after = spec.index;
  r.zero_count = spec.zero_count;
  return r;
}

nlohmann::json to_json(const EmbeddingReport& r) {
  nlohmann::json j;
  j["lambda"] = r.lambda;
  j["nh_from"] = r.nh_from;
  j["nh_to"] = r.nh_to;
  j["loss_before"] = format_double(r.loss_before);
  j["loss_after"] = format_double(r.loss_after);
  j["grad_rms_after"] = r.grad_rms_after;
  j["index_before"] = r.index_before;
  j["index_after"] = r.index_after;
  j["zero_count"] = r.zero_count;
  return j;
}

const StationaryPoint& best_perfect_minimum(const LandscapeDB& db) {
  const StationaryPoint* best = nullptr;
  for (const auto& m : db.minima()) {
    if (auc(m.params) < 1.0) continue;
    if (best == nullptr || m.loss < best->loss) best = &m;
  }
  if (best == nullptr) throw AnalysisError("database has no minimum with AUC 1");
  return *best;
}

MinimalConfigReport minimal_config_check(const LandscapeDB& db2, int nh_target,
                                         double zero_cutoff) {
  if (db2.meta().n_hidden != 2) {
    throw AnalysisError("minimal_config_check: expected an N_h = 2 database, got N_h = " +
                        std::to_string(db2.meta().n_hidden));
  }
  if (nh_target < 2) throw std::invalid_argument("minimal_config_check: nh_target must be >= 2");
  const StationaryPoint& best = best_perfect_minimum(db2);
  MinimalConfigReport r;
  r.minimum_id = best.id;
  r.embedding = embedding_report(best.params, db2.loss_config(), nh_target, zero_cutoff);
  r.stationary = r.embedding.grad_rms_after < kStationaryGradTol;
  r.expected_index = nh_target - 2;
  return r;
}

nlohmann::json to_json(const MinimalConfigReport& r) {
  nlohmann::json j = to_json(r.embedding);
  j["minimum_id"] = r.minimum_id;
  j["stationary"] = r.stationary;
  j["expected_index"] = r.expected_index;
  j["passed"] = r.passed();
  return j;
}

}  // namespace xorland
