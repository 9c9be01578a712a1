#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "xorland/explore.hpp"

using namespace xorland;

namespace {

// Distinct minima of N_h = 1, lambda = 1e-6 from an independent oracle (JAX
// autodiff and SciPy trust-region Newton from 300 random starts, see
// tests/oracles/xor_minima.py).
constexpr double kNh1Minima[] = {0.47753990330380824, 0.4775730093266212, 0.477687870679664,
                                 0.6931471805599453};

LandscapeDB empty_db(int nh, double lambda) {
  DbMeta meta;
  meta.n_hidden = nh;
  meta.lambda = lambda;
  return LandscapeDB(meta);
}

}  // namespace

TEST_CASE("one step from the origin with a tiny perturbation stays trivial") {
  BasinHoppingSettings s;
  s.steps = 1;
  s.perturbation_scale = 1e-12;
  s.start = Vector::Zero(Layout(2).dim());
  const BasinHoppingRun run = basin_hop({1e-3, true}, Layout(2), s);
  CHECK(run.distinct == 1);
  for (const auto& m : run.minima) CHECK(std::abs(m.loss - std::log(2.0)) <= 1e-15);
}

TEST_CASE("N_h = 1 minima agree with the independent oracle") {
  LandscapeDB db = empty_db(1, 1e-6);
  BasinHoppingSettings s;
  s.steps = 1000;
  s.seed = 42;
  run_chains(db, s, 4, 1);
  REQUIRE(db.minima().size() == 4);
  std::vector<double> losses;
  for (const auto& m : db.minima()) losses.push_back(m.loss);
  std::sort(losses.begin(), losses.end());
  for (int k = 0; k < 4; ++k) CHECK(std::abs(losses[k] - kNh1Minima[k]) < 1e-13);
}

TEST_CASE("basin_hop is deterministic for a seed") {
  BasinHoppingSettings s;
  s.steps = 200;
  s.seed = 9;
  const BasinHoppingRun a = basin_hop({1e-4, true}, Layout(2), s);
  const BasinHoppingRun b = basin_hop({1e-4, true}, Layout(2), s);
  REQUIRE(a.minima.size() == b.minima.size());
  for (std::size_t k = 0; k < a.minima.size(); ++k) {
    CHECK(a.minima[k].loss == b.minima[k].loss);
    CHECK(a.minima[k].w.values() == b.minima[k].w.values());
  }
  CHECK(a.accepted == b.accepted);
}

TEST_CASE("run_chains does not depend on the thread count") {
  BasinHoppingSettings s;
  s.steps = 150;
  s.seed = 3;
  LandscapeDB one = empty_db(2, 1e-4), three = empty_db(2, 1e-4);
  const BasinHoppingRun r1 = run_chains(one, s, 5, 1);
  const BasinHoppingRun r3 = run_chains(three, s, 5, 3);
  REQUIRE(one.minima().size() == three.minima().size());
  for (std::size_t k = 0; k < one.minima().size(); ++k) {
    CHECK(one.minima()[k].id == three.minima()[k].id);
    CHECK(one.minima()[k].params.values() == three.minima()[k].params.values());
  }
  CHECK(r1.quiet_accepted == r3.quiet_accepted);
  CHECK(r1.steps.size() == 5u * 150u);
}

TEST_CASE("every stored minimum carries a certificate") {
  LandscapeDB db = empty_db(3, 1e-3);
  BasinHoppingSettings s;
  s.steps = 100;
  run_chains(db, s, 2, 1);
  for (const auto& m : db.minima()) {
    CHECK(m.index == 0);
    CHECK(m.zero_count == 0);
    CHECK(m.grad_rms < kStationaryGradTol);
    CHECK_NOTHROW(certify(m, db.meta().zero_cutoff));
  }
}

TEST_CASE("observer sees every step and can stop the chain") {
  BasinHoppingSettings s;
  s.steps = 50;
  int seen = 0;
  const BasinHoppingRun run = basin_hop({1e-3, true}, Layout(1), s, [&](const StepEvent& ev) {
    ++seen;
    CHECK(ev.step == seen);
    return ev.step < 10;
  });
  CHECK(seen == 10);
  CHECK(run.steps.size() == 10u);
}

TEST_CASE("step log has one line per step") {
  BasinHoppingSettings s;
  s.steps = 20;
  std::ostringstream log;
  basin_hop({1e-3, true}, Layout(1), s, {}, &log);
  int lines = 0;
  std::istringstream in(log.str());
  for (std::string line; std::getline(in, line);) lines += line.rfind("step=", 0) == 0;
  CHECK(lines == 20);
}

TEST_CASE("sweep saturates on the N_h = 1 landscape") {
  SweepSettings s;
  s.chain.steps = 1500;
  s.max_chains = 8;
  s.saturation_window = 1000;
  const std::vector<SweepCell> cells = exhaustive_sweep({1}, {1e-6}, s);
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].saturated);
  CHECK(cells[0].distinct_minima() == 4);
  CHECK(cells[0].chains_run < 8);

  s.chain.steps = 5;
  s.max_chains = 1;
  const std::vector<SweepCell> short_cells = exhaustive_sweep({2}, {1e-6}, s);
  CHECK_FALSE(short_cells[0].saturated);
  CHECK(short_cells[0].db.meta().provenance.value("unsaturated", false));
}

TEST_CASE("settings validation") {
  BasinHoppingSettings s;
  s.steps = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.temperature = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.start = Vector::Zero(3);
  CHECK_THROWS_AS(basin_hop({1e-3, true}, Layout(1), s), std::invalid_argument);
}
