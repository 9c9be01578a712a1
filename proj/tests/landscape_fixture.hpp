#pragma once

#include "xorland/explore.hpp"
#include "xorland/saddles.hpp"

// Small complete landscape shared by several tests: N_h = 1, lambda = 1e-6,
// a short basin-hopping run followed by connection attempts.
inline xorland::LandscapeDB small_landscape(int threads = 1) {
  using namespace xorland;
  DbMeta meta;
  meta.n_hidden = 1;
  meta.lambda = 1e-6;
  LandscapeDB db(meta);
  BasinHoppingSettings bh;
  bh.steps = 300;
  bh.seed = 7;
  run_chains(db, bh, 4, threads);
  ConnectSettings cs;
  cs.threads = threads;
  connect_all(db, cs);
  return db;
}
