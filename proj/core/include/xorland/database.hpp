#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xorland/model.hpp"

namespace xorland {

enum class PointKind { minimum, transition_state, higher_index };

std::string to_string(PointKind kind);
PointKind point_kind_from_string(const std::string& text);

/// A certified stationary point of the loss.
struct StationaryPoint {
  int id = -1;
  PointKind kind = PointKind::minimum;
  WeightVector params = WeightVector::zeros(Layout(1));
  double loss = 0.0;
  double grad_rms = 0.0;
  Vector eigenvalues;  // ascending
  int index = 0;
  int zero_count = 0;
  std::set<std::string> tags;
};

/// Tag placed on the all-zero minimum.
inline constexpr const char* kTrivialTag = "trivial";

/// Evaluates loss, gradient and spectrum at `w` and classifies the point by
/// its Hessian index. Does not check stationarity.
StationaryPoint characterize(const WeightVector& w, const LossConfig& config,
                             double zero_cutoff = kDefaultZeroCutoff);

/// True when every weight is numerically zero.
bool is_trivial(const WeightVector& w, double threshold = 1e-10);

/// Raised when a point fails the certificate for its kind.
class CertificateError : public std::runtime_error {
 public:
  CertificateError(const std::string& what, Vector eigenvalues)
      : std::runtime_error(what), eigenvalues_(std::move(eigenvalues)) {}
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  Vector eigenvalues_;
};

/// Maximum gradient RMS accepted for any stored stationary point.
inline constexpr double kStationaryGradTol = 1e-9;

/// Throws CertificateError unless grad_rms < kStationaryGradTol, the stored
/// eigenvalues are ascending and recount to (index, zero_count) at
/// `zero_cutoff`, zero_count is 0, and the index matches the kind.
void certify(const StationaryPoint& point, double zero_cutoff);

struct DbMeta {
  int n_hidden = 1;
  double lambda = 0.0;
  double zero_cutoff = kDefaultZeroCutoff;
  double dedupe_tol = 1e-12;
  nlohmann::json provenance = nlohmann::json::object();
};

struct Edge {
  int ts_id = -1;
  int min_a = -1;
  int min_b = -1;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct InsertOutcome {
  int id = -1;
  bool was_new = false;
};

/// Deduplicated store of minima, transition states and their connections.
///
/// Points of one kind are lumped when their losses agree within
/// dedupe_tol * max(1, |loss|); points of different kinds are never lumped.
/// Ids come from one counter shared by all kinds and are never reassigned.
class LandscapeDB {
 public:
  LandscapeDB() = default;
  explicit LandscapeDB(DbMeta meta) : meta_(std::move(meta)) {}

  const DbMeta& meta() const noexcept { return meta_; }
  DbMeta& meta() noexcept { return meta_; }
  Layout layout() const { return Layout(meta_.n_hidden); }
  LossConfig loss_config() const { return LossConfig{meta_.lambda, true}; }

  const std::vector<StationaryPoint>& minima() const noexcept { return minima_; }
  const std::vector<StationaryPoint>& transition_states() const noexcept { return ts_; }
  const std::vector<StationaryPoint>& higher_index() const noexcept { return higher_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  int next_id() const noexcept { return next_id_; }

  /// Certifies and inserts `point`, or resolves it to an existing record of
  /// the same kind. The stored representative is kept; tags are merged.
  InsertOutcome insert_dedupe(StationaryPoint point);

  /// Adds a connection; duplicate (ts, {a, b}) triples are ignored. Returns
  /// true when the edge was new.
  bool add_edge(int ts_id, int min_a, int min_b);

  const StationaryPoint* find(int id) const;
  const StationaryPoint& at(int id) const;

  /// Id of an existing point of `kind` lumped with `loss`, if any.
  std::optional<int> match(PointKind kind, double loss) const;

  bool same_key(double a, double b) const;

  // Used by load(); bypasses dedupe but not the certificate.
  void restore(StationaryPoint point, int next_id);
  void restore_edge(Edge edge) { edges_.push_back(edge); }

 private:
  std::vector<StationaryPoint>& bucket(PointKind kind);
  const std::vector<StationaryPoint>& bucket(PointKind kind) const;

  DbMeta meta_;
  std::vector<StationaryPoint> minima_;
  std::vector<StationaryPoint> ts_;
  std::vector<StationaryPoint> higher_;
  std::vector<Edge> edges_;
  int next_id_ = 0;
};

inline constexpr int kDbFormatVersion = 1;

/// Raised by load() for unreadable or inconsistent database directories.
class DbFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes meta.json, minima.jsonl, ts.jsonl, edges.tsv (and
/// higher_index.jsonl when such points exist). Floats are written in
/// shortest round-trip form, so save -> load -> save is byte-identical.
void save(const LandscapeDB& db, const std::filesystem::path& directory);
LandscapeDB load(const std::filesystem::path& directory);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(const std::string& text);

/// Partition of minima ids into sets connected through stored edges. Each
/// set is sorted; sets are ordered by their smallest id.
std::vector<std::vector<int>> components(const LandscapeDB& db);

}  // namespace xorland
