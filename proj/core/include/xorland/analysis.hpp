#pragma once

#include <array>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xorland/database.hpp"
#include "xorland/model.hpp"

namespace xorland {

/// Probability of the correct class for each of the four training points.
std::array<double, TrainingSet::kSize> correct_class_probabilities(const WeightVector& w);

/// Scores closer than this count as tied in auc().
inline constexpr double kAucTieTolerance = 1e-3;

/// Rank AUC of the p1 scores over the four training points (two positives,
/// two negatives). Pairs whose scores differ by at most tie_tolerance
/// contribute 1/2, so the result is a multiple of 1/8 (of 1/4 without ties).
double auc(const WeightVector& w, double tie_tolerance = kAucTieTolerance);

inline constexpr double kEdgeThreshold = 1e-10;

struct SparsityMask {
  std::vector<bool> weight_nonzero;  // per flat index: |w| > threshold
  std::vector<bool> node_connected;  // per hidden unit
  int connected_count = 0;
  int zero_weights = 0;
};

/// A hidden unit is connected when any of its non-bias weights (its w1
/// column or w2 row) exceeds the threshold in magnitude.
SparsityMask sparsity(const WeightVector& w, double edge_threshold = kEdgeThreshold);

nlohmann::json to_json(const SparsityMask& mask);

/// Quality label: bad when AUC < 1; suboptimal when AUC is 1 but more than
/// three hidden units stay connected; good otherwise.
enum class MinimumQuality { good, bad, suboptimal };
std::string to_string(MinimumQuality quality);
MinimumQuality classify(const WeightVector& w, double edge_threshold = kEdgeThreshold);

struct SensitivityGrid {
  static constexpr int kSamples = 134;
  static constexpr double kStart = -0.5;
  static constexpr double kStep = 0.015;

  static double coordinate(int k) { return kStart + k * kStep; }

  std::vector<double> p1;  // p1[row * kSamples + col], x = coordinate(col), y = coordinate(row)
  std::vector<int> label;  // argmax class at each sample

  double p1_at(int row, int col) const { return p1[row * kSamples + col]; }
  int label_at(int row, int col) const { return label[row * kSamples + col]; }
};

/// Network output over the input square [-0.5, 1.5)^2, rows in parallel.
SensitivityGrid sensitivity(const WeightVector& w, int threads = 1);

/// Class demanded by the stability rule: 0 when |x - y| <= 0.5, else 1.
int robust_label(double x, double y);

/// Fraction of grid samples whose class matches robust_label.
double robustness_score(const SensitivityGrid& grid);

/// CSV with header x,y,p1,class preceded by one "# provenance" line.
void write_csv(const SensitivityGrid& grid, const nlohmann::json& provenance, std::ostream& out);

/// Binary 8-bit PGM of round(255 * p1); the first image row is the largest
/// y. The provenance is written as a header comment.
void write_pgm(const SensitivityGrid& grid, const nlohmann::json& provenance, std::ostream& out);

/// Adds one hidden unit with all-zero weights after the existing ones.
WeightVector embed(const WeightVector& w);
WeightVector embed_to(const WeightVector& w, int nh_target);

struct EmbeddingReport {
  double lambda = 0.0;
  int nh_from = 0;
  int nh_to = 0;
  double loss_before = 0.0;
  double loss_after = 0.0;
  double grad_rms_after = 0.0;
  int index_before = 0;
  int index_after = 0;
  int zero_count = 0;
};

EmbeddingReport embedding_report(const WeightVector& w, const LossConfig& config, int nh_target,
                                 double zero_cutoff = kDefaultZeroCutoff);

nlohmann::json to_json(const EmbeddingReport& report);

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The lowest minimum of `db` with AUC 1. Throws AnalysisError if none.
const StationaryPoint& best_perfect_minimum(const LandscapeDB& db);

struct MinimalConfigReport {
  int minimum_id = -1;
  EmbeddingReport embedding;
  bool stationary = false;  // grad RMS below kStationaryGradTol
  int expected_index = 0;   // nh_target - 2

  bool passed() const {
    return stationary && embedding.zero_count == 0 && embedding.index_after == expected_index;
  }
};

/// Embeds the best AUC-1 minimum of an N_h = 2 database into nh_target
/// hidden units and reports stationarity, index and degeneracy.
MinimalConfigReport minimal_config_check(const LandscapeDB& db2, int nh_target,
                                         double zero_cutoff = kDefaultZeroCutoff);

nlohmann::json to_json(const MinimalConfigReport& report);

}  // namespace xorland
