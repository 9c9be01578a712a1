#include "xorland/saddles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "xorland/parallel.hpp"
#include "xorland/symmetry.hpp"
#include "xorland/union_find.hpp"

namespace xorland {

void BandSettings::validate() const {
  if (n_images < 3) throw std::invalid_argument("BandSettings: n_images must be >= 3");
  if (!(spring_k > 0.0)) throw std::invalid_argument("BandSettings: spring_k must be > 0");
  if (!(dneb_fraction >= 0.0 && dneb_fraction <= 1.0)) {
    throw std::invalid_argument("BandSettings: dneb_fraction must lie in [0, 1]");
  }
  if (band_iters < 1) throw std::invalid_argument("BandSettings: band_iters must be >= 1");
  if (max_zoom < 0) throw std::invalid_argument("BandSettings: max_zoom must be >= 0");
}

void EFSettings::validate() const {
  if (!(uphill_trust_radius > 0.0) || max_ef_iters < 1 || !(ts_grad_tol > 0.0) ||
      !(zero_cutoff > 0.0) || projected_iters < 1) {
    throw std::invalid_argument("EFSettings: all parameters must be positive");
  }
}

namespace {

// ---------------------------------------------------------------- band

// Tangent at image i from the energy-weighted neighbour differences.
Vector band_tangent(const std::vector<Vector>& x, const std::vector<double>& e, int i) {
  const Vector plus = x[i + 1] - x[i];
  const Vector minus = x[i] - x[i - 1];
  Vector tau;
  if (e[i + 1] > e[i] && e[i] > e[i - 1]) {
    tau = plus;
  } else if (e[i + 1] < e[i] && e[i] < e[i - 1]) {
    tau = minus;
  } else {
    const double up = std::abs(e[i + 1] - e[i]);
    const double down = std::abs(e[i - 1] - e[i]);
    const double big = std::max(up, down);
    const double small = std::min(up, down);
    tau = e[i + 1] > e[i - 1] ? Vector(plus * big + minus * small)
                              : Vector(plus * small + minus * big);
  }
  const double norm = tau.norm();
  if (norm == 0.0) return plus.normalized();
  return tau / norm;
}

struct BandState {
  std::vector<Vector> x;
  std::vector<double> e;
};

// Effective gradient on every interior image; returns its RMS.
double band_forces(const Potential& potential, BandState& band, const BandSettings& s,
                   std::vector<Vector>& force) {
  const int last = static_cast<int>(band.x.size()) - 1;
  const int n = potential.dim();
  std::vector<Vector> grads(band.x.size(), Vector(n));
  for (int i = 1; i < last; ++i) band.e[i] = potential.value_and_gradient(band.x[i], grads[i]);
  double sum = 0.0;
  for (int i = 1; i < last; ++i) {
    const Vector tau = band_tangent(band.x, band.e, i);
    const Vector& g = grads[i];
    const Vector g_perp = g - g.dot(tau) * tau;
    const Vector g_spring = s.spring_k * (2.0 * band.x[i] - band.x[i - 1] - band.x[i + 1]);
    const double stretch =
        s.spring_k * ((band.x[i + 1] - band.x[i]).norm() - (band.x[i] - band.x[i - 1]).norm());
    Vector total = g_perp - stretch * tau;
    if (s.dneb_fraction > 0.0) {
      Vector spring_perp = g_spring - g_spring.dot(tau) * tau;
      const double gp = g_perp.norm();
      if (gp > 0.0) {
        const Vector u = g_perp / gp;
        spring_perp -= spring_perp.dot(u) * u;
      }
      total += s.dneb_fraction * spring_perp;
    }
    force[i] = -total;
    sum += total.squaredNorm();
  }
  return std::sqrt(sum / std::max(1, (last - 1) * n));
}

// FIRE relaxation of the interior images.
bool relax(const Potential& potential, BandState& band, const BandSettings& s, double max_move) {
  constexpr double kDtMax = 1.0;
  constexpr double kFInc = 1.1;
  constexpr double kFDec = 0.5;
  constexpr double kAlpha0 = 0.1;
  constexpr double kFAlpha = 0.99;
  constexpr int kNMin = 5;
  const int last = static_cast<int>(band.x.size()) - 1;
  const int n = potential.dim();
  std::vector<Vector> v(band.x.size(), Vector::Zero(n));
  std::vector<Vector> f(band.x.size(), Vector::Zero(n));
  double dt = 0.1;
  double alpha = kAlpha0;
  int positive = 0;
  for (int it = 0; it < s.band_iters; ++it) {
    const double r = band_forces(potential, band, s, f);
    if (r <= s.band_rms_tol) return true;
    double power = 0.0;
    double vnorm = 0.0;
    double fnorm = 0.0;
    for (int i = 1; i < last; ++i) {
      power += f[i].dot(v[i]);
      vnorm += v[i].squaredNorm();
      fnorm += f[i].squaredNorm();
    }
    vnorm = std::sqrt(vnorm);
    fnorm = std::sqrt(fnorm);
    if (power > 0.0) {
      for (int i = 1; i < last; ++i) v[i] = (1.0 - alpha) * v[i] + alpha * vnorm / fnorm * f[i];
      if (++positive > kNMin) {
        dt = std::min(dt * kFInc, kDtMax);
        alpha *= kFAlpha;
      }
    } else {
      for (int i = 1; i < last; ++i) v[i].setZero();
      positive = 0;
      dt *= kFDec;
      alpha = kAlpha0;
    }
    for (int i = 1; i < last; ++i) {
      v[i] += dt * f[i];
      Vector step = dt * v[i];
      const double norm = step.norm();
      if (norm > max_move) step *= max_move / norm;
      band.x[i] += step;
    }
  }
  return band_forces(potential, band, s, f) <= s.band_rms_tol;
}

// Direction u minimizing potential(a + radius * u) over unit vectors, by
// projected gradient descent with backtracking from `u0`.
Vector sphere_minimum(const Potential& potential, const Vector& a, double radius, Vector u0) {
  constexpr int kIters = 200;
  Vector u = std::move(u0);
  Vector g(potential.dim());
  double f = potential.value_and_gradient(a + radius * u, g);
  double step = 1.0;
  for (int it = 0; it < kIters; ++it) {
    Vector gt = radius * (g - g.dot(u) * u);  // gradient with respect to u
    const double gn = gt.norm();
    if (gn == 0.0) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
      const Vector trial = (u - step * gt).normalized();
      Vector tg(potential.dim());
      const double ft = potential.value_and_gradient(a + radius * trial, tg);
      if (ft < f) {
        u = trial;
        f = ft;
        g = tg;
        moved = true;
        step *= 2.0;
        break;
      }
    }
    if (!moved) break;
  }
  return u;
}

void collect_band(const Potential& potential, const Vector& a, const Vector& b,
                  const BandSettings& s, int depth, BandResult& out) {
  const int n_total = s.n_images + 2;
  BandState band;
  band.x.resize(n_total);
  band.e.resize(n_total);
  for (int i = 0; i < n_total; ++i) {
    const double t = static_cast<double>(i) / (n_total - 1);
    band.x[i] = (1.0 - t) * a + t * b;
  }
  band.e.front() = potential.value(a);
  band.e.back() = potential.value(b);
  // A nested band ends on an ordinary image, which is not a fixed point of
  // the band forces. Its images are instead the lowest points on spheres of
  // growing radius around the minimum `a`, which climb the gentlest ascent.
  bool ok = true;
  if (depth == 0) {
    const double spacing = (b - a).norm() / (n_total - 1);
    ok = relax(potential, band, s, spacing);
  } else {
    Vector u = (b - a).normalized();
    const double reach = (b - a).norm();
    for (int i = 1; i + 1 < n_total; ++i) {
      const double radius = reach * static_cast<double>(i) / (n_total - 1);
      u = sphere_minimum(potential, a, radius, u);
      band.x[i] = a + radius * u;
      band.e[i] = potential.value(band.x[i]);
    }
  }
  if (depth == 0) {
    out.images = band.x;
    out.energies = band.e;
    out.converged = ok;
  }
  out.zoom_depth = std::max(out.zoom_depth, depth);

  bool found = false;
  for (int i = 1; i + 1 < n_total; ++i) {
    if (band.e[i] > band.e[i - 1] && band.e[i] > band.e[i + 1]) {
      out.candidates.push_back(band.x[i]);
      found = true;
    }
  }
  if (found || depth >= s.max_zoom) return;
  // An endpoint minimum whose neighbour image lies lower hides a maximum in
  // the first segment. The far end of a nested band is not a minimum.
  if (band.e[1] < band.e[0]) collect_band(potential, a, band.x[1], s, depth + 1, out);
  if (depth == 0 && band.e[n_total - 2] < band.e[n_total - 1]) {
    collect_band(potential, b, band.x[n_total - 2], s, depth + 1, out);
  }
}

// ---------------------------------------------------------------- EF

struct PointEval {
  double value = 0.0;
  Vector grad;
  Spectrum spec;
};

PointEval evaluate(const Potential& potential, const Vector& x, double cutoff) {
  PointEval p;
  p.grad.resize(potential.dim());
  p.value = potential.value_and_gradient(x, p.grad);
  if (!std::isfinite(p.value) || !p.grad.allFinite()) {
    throw NumericalError("eigenvector-following: non-finite value", 0);
  }
  p.spec = spectrum_of(potential.hessian(x), cutoff);
  return p;
}

SaddleSearch to_search(const Vector& x, const PointEval& p, int iterations, int uphill) {
  SaddleSearch s;
  s.x = x;
  s.value = p.value;
  s.grad_rms = rms(p.grad);
  s.eigenvalues = p.spec.eigenvalues;
  s.eigenvectors = p.spec.eigenvectors;
  s.index = p.spec.index;
  s.zero_count = p.spec.zero_count;
  s.iterations = iterations;
  s.uphill_steps = uphill;
  return s;
}

double ef_magnitude(double f, double lambda) {
  const double denom = std::abs(lambda) + std::sqrt(lambda * lambda + 4.0 * f * f);
  return denom > 0.0 ? 2.0 * std::abs(f) / denom : 0.0;
}

// Eigenvector-following step: uphill in mode 0, downhill in the rest.
Vector ef_step(const PointEval& p) {
  const Matrix& v = p.spec.eigenvectors;
  const Vector f = v.transpose() * p.grad;
  Vector h(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const double m = ef_magnitude(f[i], p.spec.eigenvalues[i]);
    const double sign = f[i] >= 0.0 ? 1.0 : -1.0;
    h[i] = (i == 0 ? sign : -sign) * m;
  }
  return v * h;
}

}  // namespace

BandResult relax_band(const Potential& potential, const Vector& a, const Vector& b,
                      const BandSettings& settings) {
  settings.validate();
  if (a.size() != potential.dim() || b.size() != potential.dim()) {
    throw std::invalid_argument("relax_band: endpoint dimension mismatch");
  }
  if ((a - b).norm() == 0.0) throw std::invalid_argument("relax_band: identical endpoints");
  BandResult out;
  collect_band(potential, a, b, settings, 0, out);
  return out;
}

SaddleSearch refine_saddle(const Potential& potential, const Vector& x0,
                           const EFSettings& settings) {
  settings.validate();
  constexpr int kPolishSteps = 10;
  constexpr int kMaxHalvings = 30;
  Vector x = x0;
  double trust = settings.uphill_trust_radius;
  int uphill = 0;
  MinimizeSettings tangent;
  tangent.grad_rms_tol = settings.ts_grad_tol;
  tangent.max_iters = settings.projected_iters;
  tangent.newton_polish = false;

  PointEval p = evaluate(potential, x, settings.zero_cutoff);
  for (int it = 0; it < settings.max_ef_iters; ++it) {
    const double g = rms(p.grad);
    if (g <= settings.ts_grad_tol && p.spec.zero_count == 0) {
      if (p.spec.index == 1) {
        // Drive the gradient to working precision with plain EF steps.
        for (int k = 0; k < kPolishSteps; ++k) {
          const Vector trial = x + ef_step(p);
          PointEval q = evaluate(potential, trial, settings.zero_cutoff);
          if (!(q.grad.squaredNorm() < p.grad.squaredNorm()) || q.spec.index != 1 ||
              q.spec.zero_count != 0) {
            break;
          }
          x = trial;
          p = std::move(q);
        }
        return to_search(x, p, it, uphill);
      }
      if (p.spec.index >= 2) {
        throw WrongIndexError("eigenvector-following converged to a stationary point of index " +
                                  std::to_string(p.spec.index),
                              to_search(x, p, it, uphill));
      }
    }

    if (p.spec.index == 1) {
      Vector step = ef_step(p);
      double cap = trust;
      bool accepted = false;
      for (int h = 0; h < kMaxHalvings && !accepted; ++h, cap *= 0.5) {
        Vector s = step;
        const double norm = s.norm();
        if (norm > cap) s *= cap / norm;
        const Vector trial = x + s;
        PointEval q = evaluate(potential, trial, settings.zero_cutoff);
        if (q.grad.squaredNorm() < p.grad.squaredNorm()) {
          x = trial;
          p = std::move(q);
          accepted = true;
          trust = norm > cap ? cap : std::min(settings.uphill_trust_radius, 2.0 * cap);
        }
      }
      if (accepted) continue;
    }

    // Hybrid step: uphill along the softest mode, then relax the rest.
    Vector v = p.spec.eigenvectors.col(0);
    v.normalize();
    const double lambda = p.spec.eigenvalues[0];
    const double f = p.grad.dot(v);
    double m = lambda < 0.0 ? ef_magnitude(f, lambda) : settings.uphill_trust_radius;
    m = std::min(m, settings.uphill_trust_radius);
    x += (f >= 0.0 ? m : -m) * v;
    ++uphill;
    LocalMinimum relaxed = minimize_potential(potential, x, tangent, &v);
    x = relaxed.x;
    p = evaluate(potential, x, settings.zero_cutoff);
  }
  throw NonConvergenceError("eigenvector-following: no index-1 convergence within " +
                                std::to_string(settings.max_ef_iters) + " iterations",
                            to_search(x, p, settings.max_ef_iters, uphill));
}

namespace {

// ---------------------------------------------------------------- paths

double pm_factor(double lambda, double t) {
  if (lambda == 0.0) return t;
  return -std::expm1(-lambda * t) / lambda;
}

// Displacement after time t along the steepest-descent path of the local
// quadratic model (coefficients c = V^T g).
Vector pm_displacement(const Spectrum& spec, const Vector& c, double t) {
  Vector h(c.size());
  for (int i = 0; i < c.size(); ++i) h[i] = -c[i] * pm_factor(spec.eigenvalues[i], t);
  return spec.eigenvectors * h;
}

// Quadratic-model path step of arc length about `length`.
Vector pm_step(const Potential& potential, const Vector& x, const Vector& g, double length) {
  const Spectrum spec = spectrum_of(potential.hessian(x));
  const Vector c = spec.eigenvectors.transpose() * g;
  double lo = 0.0;
  double hi = length / std::max(g.norm(), 1e-300);
  Vector d = pm_displacement(spec, c, hi);
  for (int k = 0; k < 200 && d.norm() < length; ++k) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi) || hi > 1e300) break;
    d = pm_displacement(spec, c, hi);
  }
  if (d.norm() < length) return d;  // path saturates at the model minimum
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (pm_displacement(spec, c, mid).norm() < length) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return pm_displacement(spec, c, hi);
}

std::vector<PathPoint> descend(const Potential& potential, const Vector& start, double f0,
                               const PathSettings& s, Vector& end) {
  std::vector<PathPoint> path;
  Vector x = start;
  Vector g(potential.dim());
  double f = potential.value_and_gradient(x, g);
  if (!std::isfinite(f)) throw PathError("steepest descent: non-finite value");
  path.push_back({f, x});
  if (f > f0) throw PathError("steepest descent: displacement did not lower the value");
  double length = s.initial_step;
  Vector trial_g(potential.dim());
  for (int step = 0; step < s.max_steps; ++step) {
    if (g.squaredNorm() == 0.0) break;
    const Spectrum here = spectrum_of(potential.hessian(x));
    if (here.eigenvalues[0] > 0.0) break;  // convex region: hand over to the minimizer
    int halvings = 0;
    for (;;) {
      const Vector trial = x + pm_step(potential, x, g, length);
      const double ft = potential.value_and_gradient(trial, trial_g);
      if (std::isfinite(ft) && ft < f) {
        x = trial;
        f = ft;
        g = trial_g;
        length = std::min(1.5 * length, s.max_step);
        break;
      }
      if (++halvings > s.max_halvings) {
        throw PathError("steepest descent: value increased after " +
                        std::to_string(s.max_halvings) + " step halvings");
      }
      length *= 0.5;
    }
    path.push_back({f, x});
  }
  end = x;
  return path;
}

}  // namespace

DescentPaths trace_descent(const Potential& potential, const Vector& ts,
                           const PathSettings& settings) {
  if (settings.displacements.empty()) throw std::invalid_argument("trace_descent: no displacements");
  const double f_ts = potential.value(ts);
  const Spectrum spec = spectrum_of(potential.hessian(ts));
  if (!(spec.eigenvalues[0] < 0.0)) {
    throw std::invalid_argument("trace_descent: start point has no negative curvature");
  }
  const Vector v = spec.eigenvectors.col(0).normalized();
  DescentPaths out;
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? -1.0 : 1.0;
    double best = std::numeric_limits<double>::infinity();
    Vector start = ts + sign * settings.displacements.back() * v;
    for (double d : settings.displacements) {
      const Vector trial = ts + sign * d * v;
      const double f = potential.value(trial);
      if (f < best) {
        best = f;
        start = trial;
      }
    }
    Vector end;
    auto path = descend(potential, start, f_ts, settings, end);
    LocalMinimum m = minimize_potential(potential, end, settings.minimizer);
    if (side == 0) {
      out.minus = std::move(m);
      out.minus_path = std::move(path);
    } else {
      out.plus = std::move(m);
      out.plus_path = std::move(path);
    }
  }
  return out;
}

// ---------------------------------------------------------------- network wrappers

CandidateSet dneb_candidates(const WeightVector& wA, const WeightVector& wB,
                             const LossConfig& config, const BandSettings& settings,
                             double dedupe_tol) {
  if (!(wA.layout() == wB.layout())) throw std::invalid_argument("dneb_candidates: layout mismatch");
  const double ea = loss(wA, config);
  const double eb = loss(wB, config);
  if (std::abs(ea - eb) <= dedupe_tol * std::max(1.0, std::abs(ea))) {
    throw std::invalid_argument("dneb_candidates: endpoints share a dedupe key");
  }
  const WeightVector b = align_to(wB, wA);
  const XorLoss potential(wA.layout(), config);
  BandResult band = relax_band(potential, wA.values(), b.values(), settings);
  CandidateSet out;
  out.converged = band.converged;
  for (auto& x : band.candidates) out.candidates.emplace_back(wA.layout(), std::move(x));
  return out;
}

StationaryPoint refine_transition_state(const WeightVector& w0, const LossConfig& config,
                                        const EFSettings& settings) {
  const XorLoss potential(w0.layout(), config);
  SaddleSearch found = refine_saddle(potential, w0.values(), settings);
  StationaryPoint ts = characterize(WeightVector(w0.layout(), found.x), config, settings.zero_cutoff);
  ts.kind = PointKind::transition_state;
  return ts;
}

PathResult trace_paths(const StationaryPoint& ts, const LossConfig& config,
                       const PathSettings& settings) {
  if (ts.index != 1) throw std::invalid_argument("trace_paths: point is not index 1");
  const Layout layout = ts.params.layout();
  const XorLoss potential(layout, config);
  DescentPaths paths = trace_descent(potential, ts.params.values(), settings);
  PathResult out;
  out.ts = ts;
  auto wrap = [&](LocalMinimum& m) {
    return MinimizeResult{WeightVector(layout, std::move(m.x)), m.value, m.grad_rms, m.iterations,
                          m.converged};
  };
  out.minus_minimum = wrap(paths.minus);
  out.plus_minimum = wrap(paths.plus);
  out.minus_minimum_loss = out.minus_minimum.loss;
  out.plus_minimum_loss = out.plus_minimum.loss;
  for (auto it = paths.minus_path.rbegin(); it != paths.minus_path.rend(); ++it) {
    out.path_points.push_back(*it);
  }
  out.path_points.push_back({ts.loss, ts.params.values()});
  for (auto& p : paths.plus_path) out.path_points.push_back(std::move(p));
  return out;
}

namespace {

struct AttemptOutcome {
  PairAttempt info;
  std::vector<PathResult> paths;
  std::vector<StationaryPoint> higher;
  std::vector<StationaryPoint> known_ts;  // already stored; no paths traced
};

AttemptOutcome attempt_pair(const LandscapeDB& db, int id_a, int id_b,
                            const ConnectSettings& s) {
  AttemptOutcome out;
  out.info.id_a = id_a;
  out.info.id_b = id_b;
  const LossConfig config = db.loss_config();
  const double cutoff = db.meta().zero_cutoff;
  EFSettings ef = s.ef;
  ef.zero_cutoff = cutoff;
  const CandidateSet cands =
      dneb_candidates(db.at(id_a).params, db.at(id_b).params, config, s.band, db.meta().dedupe_tol);
  out.info.candidates = static_cast<int>(cands.candidates.size());
  std::vector<double> seen;
  auto fresh = [&](double e) {
    for (double v : seen) {
      if (db.same_key(v, e)) return false;
    }
    seen.push_back(e);
    return true;
  };
  for (const auto& c : cands.candidates) {
    try {
      StationaryPoint ts = refine_transition_state(c, config, ef);
      if (!fresh(ts.loss)) continue;
      ++out.info.ts_found;
      if (db.match(PointKind::transition_state, ts.loss)) {
        out.known_ts.push_back(std::move(ts));
        continue;
      }
      out.paths.push_back(trace_paths(ts, config, s.path));
    } catch (const WrongIndexError& e) {
      const SaddleSearch& p = e.point();
      if (p.zero_count == 0) {
        StationaryPoint h = characterize(WeightVector(db.layout(), p.x), config, cutoff);
        if (h.kind == PointKind::higher_index) out.higher.push_back(std::move(h));
      }
    } catch (const NonConvergenceError&) {
    } catch (const PathError&) {
    } catch (const NumericalError&) {
    }
  }
  return out;
}

// Inserts a path end point as a minimum; -1 when it fails the certificate.
int insert_minimum(LandscapeDB& db, const MinimizeResult& m, ConnectReport& report) {
  if (!m.converged) return -1;
  StationaryPoint p = characterize(m.w, db.loss_config(), db.meta().zero_cutoff);
  if (p.kind != PointKind::minimum) return -1;
  try {
    const InsertOutcome r = db.insert_dedupe(std::move(p));
    report.new_minima += r.was_new;
    return r.id;
  } catch (const CertificateError&) {
    return -1;
  }
}

bool same_component(const LandscapeDB& db, int a, int b) {
  for (const auto& group : components(db)) {
    const bool has_a = std::binary_search(group.begin(), group.end(), a);
    const bool has_b = std::binary_search(group.begin(), group.end(), b);
    if (has_a || has_b) return has_a && has_b;
  }
  return false;
}

bool has_edge(const LandscapeDB& db, int a, int b) {
  if (b < a) std::swap(a, b);
  for (const Edge& e : db.edges()) {
    if (e.min_a == a && e.min_b == b) return true;
  }
  return false;
}

}  // namespace

ConnectReport connect_all(LandscapeDB& db, const ConnectSettings& settings,
                          std::ostream* log) {
  settings.band.validate();
  settings.ef.validate();
  if (settings.batch_size < 1) throw std::invalid_argument("connect_all: batch_size must be >= 1");
  ConnectReport report;
  std::set<std::pair<int, int>> attempted;
  int budget = settings.max_pairs;
  while (budget > 0 && db.minima().size() >= 2) {
    std::vector<std::pair<int, int>> batch;
    const auto& minima = db.minima();
    for (std::size_t i = 0; i < minima.size() && static_cast<int>(batch.size()) < std::min(budget, settings.batch_size); ++i) {
      for (std::size_t j = i + 1; j < minima.size(); ++j) {
        const std::pair<int, int> key{minima[i].id, minima[j].id};
        if (attempted.count(key)) continue;
        if (!settings.all_pairs && has_edge(db, key.first, key.second)) continue;
        batch.push_back(key);
        if (static_cast<int>(batch.size()) >= std::min(budget, settings.batch_size)) break;
      }
    }
    if (batch.empty()) break;
    for (const auto& key : batch) attempted.insert(key);
    budget -= static_cast<int>(batch.size());

    std::vector<AttemptOutcome> outcomes(batch.size());
    const LandscapeDB& snapshot = db;
    parallel_for(static_cast<int>(batch.size()), settings.threads, [&](int k) {
      outcomes[k] = attempt_pair(snapshot, batch[k].first, batch[k].second, settings);
    });

    for (auto& out : outcomes) {
      for (auto& path : out.paths) {
        int ts_id = -1;
        try {
          const InsertOutcome r = db.insert_dedupe(path.ts);
          report.new_transition_states += r.was_new;
          ts_id = r.id;
        } catch (const CertificateError&) {
          continue;
        }
        const int a = insert_minimum(db, path.minus_minimum, report);
        const int b = insert_minimum(db, path.plus_minimum, report);
        if (a < 0 || b < 0 || a == b) continue;
        try {
          db.add_edge(ts_id, a, b);
        } catch (const std::invalid_argument&) {
        }
      }
      for (auto& h : out.higher) {
        try {
          report.new_higher_index += db.insert_dedupe(std::move(h)).was_new;
        } catch (const CertificateError&) {
        }
      }
      out.info.connected = same_component(db, out.info.id_a, out.info.id_b);
      if (log != nullptr) {
        *log << "pair=" << out.info.id_a << "," << out.info.id_b
             << " candidates=" << out.info.candidates << " ts_found=" << out.info.ts_found
             << " connected=" << (out.info.connected ? "true" : "false") << "\n";
      }
      report.attempts.push_back(out.info);
    }
  }
  report.connected = components(db).size() <= 1;
  return report;
}

VerifyReport verify_landscape(const LandscapeDB& db, double zero_cutoff,
                              ConnectSettings settings, std::ostream* log) {
  VerifyReport report;
  const LossConfig config = db.loss_config();
  auto check = [&](const std::vector<StationaryPoint>& points) {
    for (const auto& p : points) {
      ++report.points_checked;
      StationaryPoint fresh = characterize(p.params, config, zero_cutoff);
      fresh.id = p.id;
      fresh.kind = p.kind;
      try {
        certify(fresh, zero_cutoff);
      } catch (const CertificateError& e) {
        report.certificate_failures.push_back("id=" + std::to_string(p.id) + " kind=" +
                                              to_string(p.kind) + ": " + e.what());
      }
    }
  };
  check(db.minima());
  check(db.transition_states());
  check(db.higher_index());

  LandscapeDB copy = db;
  copy.meta().zero_cutoff = zero_cutoff;
  settings.all_pairs = true;
  const ConnectReport rerun = connect_all(copy, settings, log);
  report.new_minima = rerun.new_minima;
  report.new_transition_states = rerun.new_transition_states;
  return report;
}

}  // namespace xorland
