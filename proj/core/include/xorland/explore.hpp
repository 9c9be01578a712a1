#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "xorland/database.hpp"
#include "xorland/model.hpp"
#include "xorland/optimize.hpp"

namespace xorland {

struct BasinHoppingSettings {
  int steps = 5000;
  double perturbation_scale = 1.0;  // uniform half-width per coordinate
  double temperature = 1.0;
  std::uint64_t seed = 0;
  double initial_box = 2.0;
  /// Chain start; a uniform draw from [-initial_box, initial_box]^dim if unset.
  std::optional<Vector> start;
  /// Also minimize from the origin before the chain starts. The origin is a
  /// stationary point for every (N_h, lambda), so this records the trivial
  /// minimum whenever it is certified.
  bool include_origin = true;
  /// After this many consecutive steps without a minimum new to the chain,
  /// the next proposal is a fresh uniform draw from a box whose half-width is
  /// itself uniform in (0, initial_box], accepted unconditionally. 0 disables
  /// restarts.
  int restart_interval = 20;
  double zero_cutoff = kDefaultZeroCutoff;
  MinimizeSettings minimizer;

  void validate() const;
};

/// One Monte Carlo step, reported to an observer.
struct StepEvent {
  int step = 0;
  bool accepted = false;
  double loss = 0.0;  // loss of the proposed minimum (NaN if it was dropped)
  bool new_distinct = false;
  int distinct = 0;
};

/// Per-step record: whether the move was accepted and which entry of
/// BasinHoppingRun::minima it produced (-1 when the proposal was dropped).
struct StepRecord {
  bool accepted = false;
  int minimum = -1;
};

struct BasinHoppingRun {
  std::vector<MinimizeResult> minima;  // certified minima in visit order, duplicates kept
  std::vector<StepRecord> steps;
  int prelude = 0;  // minima recorded before the first step (origin, chain start)
  int unconverged = 0;
  int rejected_certificate = 0;
  int accepted = 0;
  int distinct = 0;
  /// After a merge into a database: accepted steps since the last minimum
  /// that was new to the database.
  int quiet_accepted = 0;
};

/// Observer called after each step; return false to stop the chain.
using StepObserver = std::function<bool(const StepEvent&)>;

/// Basin-hopping: perturb the current minimum uniformly, minimize, accept by
/// the Metropolis rule on the loss change. Minimizations that do not converge
/// or whose Hessian is not positive definite at the zero cutoff are dropped
/// and counted.
BasinHoppingRun basin_hop(const LossConfig& config, const Layout& layout,
                          const BasinHoppingSettings& settings,
                          const StepObserver& observer = {}, std::ostream* log = nullptr);

/// Inserts each certified minimum from `run` into `db` in visit order.
/// Returns the number of new distinct minima.
int insert_minima(LandscapeDB& db, const BasinHoppingRun& run);

struct SweepSettings {
  BasinHoppingSettings chain;     // template; seed is the base seed
  int max_chains = 16;
  int saturation_window = 2000;   // accepted steps with no new minimum
  int threads = 1;
};

struct SweepCell {
  int n_hidden = 0;
  double lambda = 0.0;
  LandscapeDB db;
  int chains_run = 0;
  bool saturated = false;
  int distinct_minima() const { return static_cast<int>(db.minima().size()); }
};

/// Runs chains with derived seeds for every (N_h, lambda) cell until the
/// distinct-minima set has been stable for `saturation_window` consecutive
/// accepted steps, or `max_chains` chains have run (cell flagged unsaturated).
std::vector<SweepCell> exhaustive_sweep(const std::vector<int>& nh_list,
                                        const std::vector<double>& lambda_list,
                                        const SweepSettings& settings);

/// Runs `chains` independent chains (seeds derived from settings.seed by
/// chain index) and merges them into `db` in chain order. The returned
/// quiet_accepted is measured over the merged step sequence, as in the sweep.
/// `log` receives one summary line per chain; `step_log`, if given, receives
/// each chain's per-step lines after a "chain=<c>" header, in chain order.
BasinHoppingRun run_chains(LandscapeDB& db, const BasinHoppingSettings& settings, int chains,
                           int threads, std::ostream* log = nullptr,
                           std::ostream* step_log = nullptr);

}  // namespace xorland
