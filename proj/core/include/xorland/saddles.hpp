#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "xorland/database.hpp"
#include "xorland/model.hpp"
#include "xorland/optimize.hpp"
#include "xorland/potential.hpp"

namespace xorland {

struct BandSettings {
  int n_images = 15;  // interior images
  double spring_k = 1.0;
  double dneb_fraction = 0.1;
  int band_iters = 2000;
  double band_rms_tol = 1e-6;
  /// Nested bands between a minimum endpoint and its neighbour image when the
  /// profile leaves that endpoint downhill (the barrier lies inside the
  /// first segment).
  int max_zoom = 8;

  void validate() const;
};

struct EFSettings {
  double uphill_trust_radius = 0.1;
  int max_ef_iters = 500;
  double ts_grad_tol = 1e-9;
  double zero_cutoff = kDefaultZeroCutoff;
  int projected_iters = 30;  // LBFGS iterations per tangent-space relaxation

  void validate() const;
};

/// Relaxed band and its interior local maxima.
struct BandResult {
  std::vector<Vector> images;  // including both endpoints
  std::vector<double> energies;
  std::vector<Vector> candidates;
  bool converged = false;
  int zoom_depth = 0;
};

/// Doubly-nudged elastic band between a and b on an arbitrary potential.
/// Images whose value exceeds both neighbours are returned as candidates.
BandResult relax_band(const Potential& potential, const Vector& a, const Vector& b,
                      const BandSettings& settings);

/// A stationary point of a Potential with its Hessian spectrum.
struct SaddleSearch {
  Vector x;
  double value = 0.0;
  double grad_rms = 0.0;
  Vector eigenvalues;
  Matrix eigenvectors;
  int index = 0;
  int zero_count = 0;
  int iterations = 0;
  int uphill_steps = 0;
};

/// Refinement stopped at a stationary point of index != 1.
class WrongIndexError : public std::runtime_error {
 public:
  WrongIndexError(const std::string& what, SaddleSearch point)
      : std::runtime_error(what), point_(std::move(point)) {}
  const SaddleSearch& point() const noexcept { return point_; }

 private:
  SaddleSearch point_;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, SaddleSearch last)
      : std::runtime_error(what), last_(std::move(last)) {}
  const SaddleSearch& last() const noexcept { return last_; }

 private:
  SaddleSearch last_;
};

/// Hybrid eigenvector-following: uphill steps along the lowest Hessian
/// eigenvector alternate with minimization in its orthogonal complement.
/// Once the index is 1, full eigenvector-following steps in all modes are
/// taken. Converges on grad RMS <= ts_grad_tol, index 1 and no zero
/// eigenvalues.
SaddleSearch refine_saddle(const Potential& potential, const Vector& x0,
                           const EFSettings& settings);

struct PathSettings {
  std::vector<double> displacements{1e-5, 1e-4, 1e-3, 1e-2};
  double initial_step = 1e-2;
  double max_step = 0.5;
  int max_steps = 2000;
  int max_halvings = 10;
  MinimizeSettings minimizer;
};

class PathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathPoint {
  double value = 0.0;
  Vector x;
};

/// The two steepest-descent paths leaving a transition state.
struct DescentPaths {
  LocalMinimum minus;
  LocalMinimum plus;
  std::vector<PathPoint> minus_path;  // starts next to the ts
  std::vector<PathPoint> plus_path;
};

/// Displaces along -/+ the unstable eigenvector by the sampled magnitude
/// that lowers the value most, then follows the steepest-descent path with
/// second-order (quadratic model) steps and finishes with a minimization.
DescentPaths trace_descent(const Potential& potential, const Vector& ts,
                           const PathSettings& settings = {});

// Network-level wrappers.

struct CandidateSet {
  std::vector<WeightVector> candidates;
  bool converged = false;
};

/// Band candidates between two minima. wB is first mapped to the symmetry
/// image closest to wA. Throws std::invalid_argument when the two points
/// share a dedupe key.
CandidateSet dneb_candidates(const WeightVector& wA, const WeightVector& wB,
                             const LossConfig& config, const BandSettings& settings,
                             double dedupe_tol = 1e-12);

/// Throws WrongIndexError or NonConvergenceError (see refine_saddle).
StationaryPoint refine_transition_state(const WeightVector& w0, const LossConfig& config,
                                        const EFSettings& settings = {});

struct PathResult {
  StationaryPoint ts;
  MinimizeResult minus_minimum;
  MinimizeResult plus_minimum;
  double minus_minimum_loss = 0.0;
  double plus_minimum_loss = 0.0;
  std::vector<PathPoint> path_points;  // minus path reversed, ts, plus path
};

PathResult trace_paths(const StationaryPoint& ts, const LossConfig& config,
                       const PathSettings& settings = {});

struct ConnectSettings {
  BandSettings band;
  EFSettings ef;
  PathSettings path;
  int max_pairs = 100000;
  int threads = 1;
  int batch_size = 16;  // pairs computed per merge; independent of threads
  /// Also attempt pairs that already share an edge. Attempts depend only on
  /// the two end points, so with this set a second run over the same
  /// database finds nothing new unless the cutoff changes.
  bool all_pairs = true;
};

struct PairAttempt {
  int id_a = -1;
  int id_b = -1;
  int candidates = 0;
  int ts_found = 0;
  bool connected = false;
};

struct ConnectReport {
  std::vector<PairAttempt> attempts;
  int new_minima = 0;
  int new_transition_states = 0;
  int new_higher_index = 0;
  bool connected = false;  // one component after the run
};

/// Attempts every pair of minima (optionally skipping pairs already joined
/// by an edge), including
/// pairs involving minima discovered along the way, until no such pair is
/// left or max_pairs attempts were made. Pairs run in fixed-size batches
/// against a snapshot of the database and are merged in pair order, so the
/// result does not depend on the thread count. Logs one line per pair.
ConnectReport connect_all(LandscapeDB& db, const ConnectSettings& settings,
                          std::ostream* log = nullptr);

struct VerifyReport {
  int points_checked = 0;
  std::vector<std::string> certificate_failures;
  int new_minima = 0;
  int new_transition_states = 0;
  bool passed() const {
    return certificate_failures.empty() && new_minima == 0 && new_transition_states == 0;
  }
};

/// Re-certifies every stored point at `zero_cutoff`, then reruns connection
/// attempts over all pairs of minima on a copy of the database with that
/// cutoff and counts stationary points it does not already contain.
VerifyReport verify_landscape(const LandscapeDB& db, double zero_cutoff,
                              ConnectSettings settings, std::ostream* log = nullptr);

}  // namespace xorland
