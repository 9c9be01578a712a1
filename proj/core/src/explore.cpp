#include "xorland/explore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "xorland/parallel.hpp"
#include "xorland/rng.hpp"

namespace xorland {

void BasinHoppingSettings::validate() const {
  if (steps < 1) throw std::invalid_argument("BasinHoppingSettings: steps must be >= 1");
  if (!(perturbation_scale > 0.0)) {
    throw std::invalid_argument("BasinHoppingSettings: perturbation_scale must be > 0");
  }
  if (!(temperature > 0.0)) throw std::invalid_argument("BasinHoppingSettings: temperature must be > 0");
  if (!(initial_box >= 0.0)) throw std::invalid_argument("BasinHoppingSettings: initial_box must be >= 0");
  if (restart_interval < 0) {
    throw std::invalid_argument("BasinHoppingSettings: restart_interval must be >= 0");
  }
  minimizer.validate();
}

namespace {

// Distinct loss values seen so far by one chain.
class DistinctLosses {
 public:
  explicit DistinctLosses(double tol) : tol_(tol) {}

  bool add(double loss) {
    for (double v : values_) {
      if (std::abs(v - loss) <= tol_ * std::max(1.0, std::abs(v))) return false;
    }
    values_.push_back(loss);
    return true;
  }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  double tol_;
  std::vector<double> values_;
};

bool certified_minimum(const MinimizeResult& r, const LossConfig& config, double cutoff) {
  const Spectrum spec = spectrum(r.w, config, cutoff);
  return spec.index == 0 && spec.zero_count == 0;
}

}  // namespace

BasinHoppingRun basin_hop(const LossConfig& config, const Layout& layout,
                          const BasinHoppingSettings& settings, const StepObserver& observer,
                          std::ostream* log) {
  settings.validate();
  const int n = layout.dim();
  Rng rng(settings.seed);
  BasinHoppingRun run;
  DistinctLosses distinct(1e-12);

  // Returns the index in run.minima, or -1 when the point is dropped.
  auto quench = [&](const Vector& x) -> std::pair<MinimizeResult, int> {
    MinimizeResult r = minimize(WeightVector(layout, x), config, settings.minimizer);
    if (!r.converged) {
      ++run.unconverged;
      return {std::move(r), -1};
    }
    if (!certified_minimum(r, config, settings.zero_cutoff)) {
      ++run.rejected_certificate;
      if (log != nullptr) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "excluded non-minimum E=%.15e\n", r.loss);
        *log << buf;
      }
      return {std::move(r), -1};
    }
    distinct.add(r.loss);
    run.minima.push_back(r);
    return {std::move(r), static_cast<int>(run.minima.size()) - 1};
  };

  if (settings.include_origin) quench(Vector::Zero(n));

  Vector start(n);
  if (settings.start) {
    if (settings.start->size() != n) throw std::invalid_argument("basin_hop: start has wrong dimension");
    start = *settings.start;
  } else {
    for (int a = 0; a < n; ++a) start[a] = rng.uniform(-settings.initial_box, settings.initial_box);
  }
  auto [current, first] = quench(start);
  run.prelude = static_cast<int>(run.minima.size());

  Vector trial(n);
  int quiet = 0;
  for (int step = 1; step <= settings.steps; ++step) {
    const bool restart = settings.restart_interval > 0 && quiet >= settings.restart_interval;
    if (restart) {
      // The half-width itself is random so that basins near the origin are
      // sampled as well as large-weight ones.
      const double box = settings.initial_box * (1.0 - rng.uniform());
      for (int a = 0; a < n; ++a) trial[a] = rng.uniform(-box, box);
      quiet = 0;
    } else {
      trial = current.w.values();
      for (int a = 0; a < n; ++a) {
        trial[a] += rng.uniform(-settings.perturbation_scale, settings.perturbation_scale);
      }
    }
    const int before = distinct.size();
    auto [proposal, slot] = quench(trial);
    const double u = rng.uniform();
    bool accepted = false;
    if (slot >= 0) {
      const double delta = proposal.loss - current.loss;
      accepted = restart || delta <= 0.0 || u < std::exp(-delta / settings.temperature);
      if (accepted) {
        current = std::move(proposal);
        ++run.accepted;
      }
    }
    run.steps.push_back({accepted, slot});

    StepEvent ev;
    ev.step = step;
    ev.accepted = accepted;
    ev.loss = slot >= 0 ? run.minima[slot].loss : std::numeric_limits<double>::quiet_NaN();
    ev.new_distinct = distinct.size() > before;
    quiet = ev.new_distinct ? 0 : quiet + 1;
    ev.distinct = distinct.size();
    if (log != nullptr) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "step=%d accepted=%s E=%.15e distinct=%d\n", step,
                    accepted ? "true" : "false", ev.loss, ev.distinct);
      *log << buf;
    }
    if (observer && !observer(ev)) break;
  }
  run.distinct = distinct.size();
  return run;
}

int insert_minima(LandscapeDB& db, const BasinHoppingRun& run) {
  int added = 0;
  const LossConfig config = db.loss_config();
  for (const auto& m : run.minima) {
    if (db.match(PointKind::minimum, m.loss)) continue;
    added += db.insert_dedupe(characterize(m.w, config, db.meta().zero_cutoff)).was_new;
  }
  return added;
}

namespace {

// Inserts the prelude, then the step minima, counting accepted steps since
// the last minimum that was new to `db`. Returns true once `window` (> 0) is
// reached.
bool merge_run(LandscapeDB& db, const BasinHoppingRun& run, int& quiet, int window) {
  const LossConfig config = db.loss_config();
  auto add = [&](const MinimizeResult& m) {
    if (db.match(PointKind::minimum, m.loss)) return false;
    return db.insert_dedupe(characterize(m.w, config, db.meta().zero_cutoff)).was_new;
  };
  bool saturated = false;
  for (int p = 0; p < run.prelude; ++p) {
    if (add(run.minima[p])) quiet = 0;
  }
  for (const StepRecord& r : run.steps) {
    if (r.minimum >= 0 && add(run.minima[r.minimum])) quiet = 0;
    if (r.accepted) ++quiet;
    if (window > 0 && quiet >= window) saturated = true;
  }
  return saturated;
}

}  // namespace

BasinHoppingRun run_chains(LandscapeDB& db, const BasinHoppingSettings& settings, int chains,
                           int threads, std::ostream* log, std::ostream* step_log) {
  std::vector<BasinHoppingRun> runs(chains);
  std::vector<std::ostringstream> step_lines(step_log != nullptr ? chains : 0);
  const LossConfig config = db.loss_config();
  const Layout layout = db.layout();
  parallel_for(chains, threads, [&](int c) {
    BasinHoppingSettings s = settings;
    s.seed = derive_seed(settings.seed, static_cast<std::uint64_t>(c));
    runs[c] = basin_hop(config, layout, s, {}, step_log != nullptr ? &step_lines[c] : nullptr);
  });
  if (step_log != nullptr) {
    for (int c = 0; c < chains; ++c) *step_log << "chain=" << c << "\n" << step_lines[c].str();
  }
  BasinHoppingRun total;
  for (int c = 0; c < chains; ++c) {
    merge_run(db, runs[c], total.quiet_accepted, 0);
    total.unconverged += runs[c].unconverged;
    total.rejected_certificate += runs[c].rejected_certificate;
    total.accepted += runs[c].accepted;
    if (log != nullptr) {
      *log << "chain=" << c << " steps=" << runs[c].steps.size() << " accepted=" << runs[c].accepted
           << " unconverged=" << runs[c].unconverged
           << " excluded=" << runs[c].rejected_certificate << " distinct=" << runs[c].distinct
           << "\n";
    }
    const int offset = static_cast<int>(total.minima.size());
    for (auto& m : runs[c].minima) total.minima.push_back(std::move(m));
    for (StepRecord r : runs[c].steps) {
      if (r.minimum >= 0) r.minimum += offset;
      total.steps.push_back(r);
    }
  }
  total.distinct = static_cast<int>(db.minima().size());
  return total;
}

std::vector<SweepCell> exhaustive_sweep(const std::vector<int>& nh_list,
                                        const std::vector<double>& lambda_list,
                                        const SweepSettings& settings) {
  if (settings.max_chains < 1) throw std::invalid_argument("exhaustive_sweep: max_chains must be >= 1");
  std::vector<SweepCell> cells;
  std::uint64_t cell_index = 0;
  for (int nh : nh_list) {
    for (double lambda : lambda_list) {
      DbMeta meta;
      meta.n_hidden = nh;
      meta.lambda = lambda;
      meta.zero_cutoff = settings.chain.zero_cutoff;
      SweepCell cell{nh, lambda, LandscapeDB(meta)};
      const LossConfig config{lambda, true};
      const Layout layout(nh);
      const std::uint64_t cell_seed = derive_seed(settings.chain.seed, cell_index++);

      int quiet = 0;  // accepted steps since the last new minimum
      int chain = 0;
      while (chain < settings.max_chains && !cell.saturated) {
        const int batch = std::min(std::max(1, settings.threads), settings.max_chains - chain);
        std::vector<BasinHoppingRun> runs(batch);
        parallel_for(batch, settings.threads, [&](int b) {
          BasinHoppingSettings s = settings.chain;
          s.seed = derive_seed(cell_seed, static_cast<std::uint64_t>(chain + b));
          runs[b] = basin_hop(config, layout, s);
        });
        for (const auto& run : runs) {
          ++chain;
          if (merge_run(cell.db, run, quiet, settings.saturation_window)) cell.saturated = true;
        }
      }
      cell.chains_run = chain;
      if (!cell.saturated) cell.db.meta().provenance["unsaturated"] = true;
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace xorland
