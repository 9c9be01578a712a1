#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <CLI11.hpp>

#include "xorland/analysis.hpp"
#include "xorland/database.hpp"
#include "xorland/explore.hpp"
#include "xorland/graphs.hpp"
#include "xorland/parallel.hpp"
#include "xorland/saddles.hpp"
#include "xorland/symmetry.hpp"

#ifndef XORLAND_VERSION
#define XORLAND_VERSION "0.0.0"
#endif

namespace xorland::cli {

namespace fs = std::filesystem;

const char* version() { return XORLAND_VERSION; }

nlohmann::json RunConfig::to_json() const {
  const MinimizeSettings minimizer;
  const EFSettings ef;
  const BandSettings band;
  nlohmann::json j;
  j["tool"] = "xorland";
  j["version"] = version();
  j["subcommand"] = subcommand;
  j["params"] = params;
  j["tolerances"] = {
      {"minimize_grad_rms", minimizer.grad_rms_tol},
      {"stationary_grad_rms", kStationaryGradTol},
      {"ts_grad_rms", ef.ts_grad_tol},
      {"zero_cutoff", kDefaultZeroCutoff},
      {"dedupe_rel", DbMeta{}.dedupe_tol},
      {"band_rms", band.band_rms_tol},
      {"edge_threshold", kEdgeThreshold},
      {"auc_tie", kAucTieTolerance},
  };
  return j;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LandscapeDB open_db(const std::string& path) {
  if (!fs::exists(path)) throw IoError("no database at " + path);
  return load(path);
}

void store_db(const LandscapeDB& db, const std::string& path) {
  try {
    save(db, path);
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

// Writes through a buffer so nothing is left behind when rendering throws.
template <class Fn>
void write_file(const std::string& path, Fn&& fn, bool binary = false) {
  std::ostringstream buffer(binary ? std::ios::out | std::ios::binary : std::ios::out);
  fn(buffer);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << buffer.str();
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

void append_run(LandscapeDB& db, const nlohmann::json& run) {
  auto& prov = db.meta().provenance;
  if (!prov.is_object()) prov = nlohmann::json::object();
  prov["runs"].push_back(run);
}

nlohmann::json artifact_provenance(const RunConfig& cfg, const LandscapeDB& db) {
  return {{"run", cfg.to_json()}, {"db", db.meta().provenance}};
}

const StationaryPoint& point_by_id(const LandscapeDB& db, int id) {
  const StationaryPoint* p = db.find(id);
  if (p == nullptr) throw UsageError("no stationary point with id " + std::to_string(id));
  return *p;
}

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

struct ChainOptions {
  int steps = 5000;
  std::uint64_t seed = 0;
  double temperature = 1.0;
  double perturbation = 1.0;
  double box = 2.0;
  int restart_interval = 20;
  bool no_origin = false;

  void add_to(CLI::App* app) {
    app->add_option("--steps", steps, "Basin-hopping steps per chain")->capture_default_str();
    app->add_option("--seed", seed, "Base seed; chain seeds are derived from it")->capture_default_str();
    app->add_option("--temperature", temperature)->capture_default_str();
    app->add_option("--perturbation", perturbation, "Uniform step half-width")->capture_default_str();
    app->add_option("--box", box, "Half-width of the random start box")->capture_default_str();
    app->add_option("--restart-interval", restart_interval,
                    "Steps without a new minimum before a fresh random start (0: never)")
        ->capture_default_str();
    app->add_flag("--no-origin", no_origin, "Do not quench from the all-zero point");
  }

  BasinHoppingSettings settings() const {
    BasinHoppingSettings s;
    s.steps = steps;
    s.seed = seed;
    s.temperature = temperature;
    s.perturbation_scale = perturbation;
    s.initial_box = box;
    s.restart_interval = restart_interval;
    s.include_origin = !no_origin;
    return s;
  }

  nlohmann::json to_json() const {
    return {{"steps", steps},       {"seed", seed}, {"temperature", temperature},
            {"perturbation", perturbation}, {"box", box}, {"restart_interval", restart_interval},
            {"include_origin", !no_origin}};
  }
};

// explore ---------------------------------------------------------------

struct ExploreOptions {
  int nh = 0;
  double lambda = 0.0;
  int chains = 16;
  int window = 2000;
  std::string db;
  std::string log;
  ChainOptions chain;
};

int cmd_explore(const ExploreOptions& o, int threads, std::ostream& out, std::ostream& err) {
  if (o.nh < 1) throw UsageError("--nh must be >= 1");
  if (!(o.lambda >= 0.0)) throw UsageError("--lambda must be >= 0");
  if (o.chains < 1) throw UsageError("--chains must be >= 1");

  LandscapeDB db;
  if (fs::exists(fs::path(o.db) / "meta.json")) {
    db = load(o.db);
    if (db.meta().n_hidden != o.nh || db.meta().lambda != o.lambda) {
      throw UsageError("existing database at " + o.db + " has different N_h or lambda");
    }
  } else {
    DbMeta meta;
    meta.n_hidden = o.nh;
    meta.lambda = o.lambda;
    db = LandscapeDB(meta);
  }

  BasinHoppingSettings settings = o.chain.settings();
  try {
    settings.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  BasinHoppingRun total;
  if (o.log.empty()) {
    total = run_chains(db, settings, o.chains, threads, &err);
  } else {
    std::ostringstream steps;
    total = run_chains(db, settings, o.chains, threads, &err, &steps);
    write_file(o.log, [&](std::ostream& f) { f << steps.str(); });
  }
  const bool saturated = o.window <= 0 || total.quiet_accepted >= o.window;

  RunConfig cfg{"explore",
                {{"nh", o.nh}, {"lambda", o.lambda}, {"chains", o.chains}, {"db", o.db},
                 {"saturation_window", o.window}, {"chain", o.chain.to_json()}}};
  nlohmann::json run = cfg.to_json();
  run["saturated"] = saturated;
  run["quiet_accepted"] = total.quiet_accepted;
  append_run(db, run);
  store_db(db, o.db);

  int nontrivial = 0;
  for (const auto& m : db.minima()) nontrivial += !m.tags.count(kTrivialTag);
  out << "distinct minima: " << db.minima().size() << " (" << nontrivial << " nontrivial)\n";
  if (!saturated) {
    err << "error: exploration unsaturated: only " << total.quiet_accepted
        << " accepted steps since the last new minimum (window " << o.window << ")\n";
    return kVerifyFailed;
  }
  return kOk;
}

// sweep -----------------------------------------------------------------

struct SweepOptions {
  std::vector<int> nh;
  std::vector<double> lambda;
  int max_chains = 16;
  int window = 2000;
  std::string out;
  ChainOptions chain;
};

int cmd_sweep(const SweepOptions& o, int threads, std::ostream& out, std::ostream& err) {
  SweepSettings s;
  s.chain = o.chain.settings();
  s.max_chains = o.max_chains;
  s.saturation_window = o.window;
  s.threads = threads;
  std::vector<SweepCell> cells;
  try {
    cells = exhaustive_sweep(o.nh, o.lambda, s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  RunConfig cfg{"sweep",
                {{"nh", o.nh}, {"lambda", o.lambda}, {"max_chains", o.max_chains},
                 {"saturation_window", o.window}, {"out", o.out}, {"chain", o.chain.to_json()}}};
  nlohmann::json summary;
  summary["provenance"] = cfg.to_json();
  summary["cells"] = nlohmann::json::array();
  bool all_saturated = true;
  for (auto& cell : cells) {
    const std::string name = "nh" + std::to_string(cell.n_hidden) + "_lambda" + format_double(cell.lambda);
    nlohmann::json run = cfg.to_json();
    run["saturated"] = cell.saturated;
    append_run(cell.db, run);
    store_db(cell.db, (fs::path(o.out) / name).string());
    summary["cells"].push_back({{"db", name},
                                {"nh", cell.n_hidden},
                                {"lambda", cell.lambda},
                                {"minima", cell.distinct_minima()},
                                {"chains_run", cell.chains_run},
                                {"saturated", cell.saturated}});
    out << name << " minima=" << cell.distinct_minima() << " chains=" << cell.chains_run
        << " saturated=" << (cell.saturated ? "true" : "false") << "\n";
    all_saturated = all_saturated && cell.saturated;
  }
  write_file((fs::path(o.out) / "summary.json").string(),
             [&](std::ostream& f) { f << summary.dump(2) << "\n"; });
  if (!all_saturated) {
    err << "error: some cells are unsaturated\n";
    return kVerifyFailed;
  }
  return kOk;
}

// connect ---------------------------------------------------------------

struct ConnectOptions {
  std::string db;
  int max_pairs = 100000;
  bool new_pairs_only = false;
  bool quiet = false;
};

int cmd_connect(const ConnectOptions& o, int threads, std::ostream& out, std::ostream& err) {
  LandscapeDB db = open_db(o.db);
  ConnectSettings s;
  s.threads = threads;
  s.max_pairs = o.max_pairs;
  s.all_pairs = !o.new_pairs_only;
  const ConnectReport r = connect_all(db, s, o.quiet ? nullptr : &err);
  RunConfig cfg{"connect",
                {{"db", o.db}, {"max_pairs", o.max_pairs}, {"all_pairs", s.all_pairs}}};
  append_run(db, cfg.to_json());
  store_db(db, o.db);
  out << "pairs attempted: " << r.attempts.size() << "\n"
      << "new minima: " << r.new_minima << "\n"
      << "new transition states: " << r.new_transition_states << "\n"
      << "new higher-index points: " << r.new_higher_index << "\n"
      << "minima: " << db.minima().size() << " transition states: " << db.transition_states().size()
      << " edges: " << db.edges().size() << "\n"
      << "connected: " << (r.connected ? "true" : "false") << "\n";
  return kOk;
}

// graph -----------------------------------------------------------------

struct GraphOptions {
  std::string db;
  std::optional<double> delta_e;
  std::optional<double> top;
  std::string svg;
  std::string dot;
  bool include_trivial = false;
  int width = 800;
  int height = 600;
  bool no_color = false;
  bool no_scale_bar = false;
};

int cmd_graph(const GraphOptions& o, std::ostream& out, std::ostream& err) {
  const LandscapeDB db = open_db(o.db);
  if (o.width < 100 || o.height < 100) throw UsageError("--width and --height must be >= 100");
  TreeOptions t;
  t.delta_e = o.delta_e;
  t.top = o.top;
  t.include_trivial = o.include_trivial;
  if (!t.include_trivial) {
    bool any = false;
    for (const auto& m : db.minima()) any = any || !m.tags.count(kTrivialTag);
    if (!any) {
      err << "note: only the trivial minimum is stored; drawing it\n";
      t.include_trivial = true;
    }
  }
  DisconnectivityTree tree;
  try {
    tree = build_tree(db, t);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::map<int, double> aucs;
  for (const auto& m : db.minima()) aucs[m.id] = auc(m.params);

  nlohmann::json params = {{"db", o.db},         {"svg", o.svg},
                           {"dot", o.dot},       {"include_trivial", t.include_trivial},
                           {"delta_e", tree.delta_e}, {"top", tree.top},
                           {"width", o.width},   {"height", o.height}};
  RenderStyle style;
  style.width = o.width;
  style.height = o.height;
  style.color_by_auc = !o.no_color;
  style.scale_bar = !o.no_scale_bar;
  style.provenance = artifact_provenance(RunConfig{"graph", params}, db);

  write_file(o.svg, [&](std::ostream& f) { render_svg(tree, style, aucs, f); });
  if (!o.dot.empty()) write_file(o.dot, [&](std::ostream& f) { render_dot(tree, style, aucs, f); });
  out << "leaves: " << tree.leaf_count << " merges: " << tree.merge_count()
      << " thresholds: " << tree.thresholds.size() << " delta_e: " << fmt("%.6g", tree.delta_e)
      << "\n";
  return kOk;
}

// sensitivity -----------------------------------------------------------

struct SensitivityOptions {
  std::string db;
  int min_id = -1;
  std::string csv;
  std::string pgm;
  std::string report;
};

int cmd_sensitivity(const SensitivityOptions& o, int threads, std::ostream& out, std::ostream&) {
  const LandscapeDB db = open_db(o.db);
  const StationaryPoint& p = point_by_id(db, o.min_id);
  const SensitivityGrid grid = sensitivity(p.params, threads);
  const RunConfig cfg{"sensitivity",
                      {{"db", o.db}, {"min_id", o.min_id}, {"csv", o.csv}, {"pgm", o.pgm},
                       {"report", o.report}}};
  const nlohmann::json prov = artifact_provenance(cfg, db);

  const double score = robustness_score(grid);
  const auto probs = correct_class_probabilities(p.params);
  nlohmann::json report;
  report["provenance"] = prov;
  report["id"] = p.id;
  report["kind"] = to_string(p.kind);
  report["loss"] = format_double(p.loss);
  report["auc"] = auc(p.params);
  report["correct_class_probabilities"] = probs;
  report["quality"] = to_string(classify(p.params));
  report["robustness_score"] = score;
  report["sparsity"] = to_json(sparsity(p.params));

  write_file(o.csv, [&](std::ostream& f) { write_csv(grid, prov, f); });
  if (!o.pgm.empty()) write_file(o.pgm, [&](std::ostream& f) { write_pgm(grid, prov, f); }, true);
  if (!o.report.empty()) write_file(o.report, [&](std::ostream& f) { f << report.dump(2) << "\n"; });
  out << "id: " << p.id << " robustness: " << fmt("%.6f", score)
      << " connected nodes: " << report["sparsity"]["connected_count"] << "\n";
  return kOk;
}

// embed -----------------------------------------------------------------

struct EmbedOptions {
  std::string db_from;
  int nh_to = 0;
  std::optional<int> min_id;
  std::string output;
  bool check = false;
};

int cmd_embed(const EmbedOptions& o, std::ostream& out, std::ostream& err) {
  const LandscapeDB db = open_db(o.db_from);
  if (o.nh_to < db.meta().n_hidden) {
    throw UsageError("--nh-to must be >= the database's N_h (" + std::to_string(db.meta().n_hidden) + ")");
  }
  const StationaryPoint* source = nullptr;
  try {
    source = o.min_id ? &point_by_id(db, *o.min_id) : &best_perfect_minimum(db);
  } catch (const AnalysisError& e) {
    throw UsageError(e.what());
  }
  nlohmann::json report;
  bool passed = true;
  if (!o.min_id && db.meta().n_hidden == 2) {
    const MinimalConfigReport r = minimal_config_check(db, o.nh_to);
    report = to_json(r);
    passed = r.passed();
  } else {
    report = to_json(embedding_report(source->params, db.loss_config(), o.nh_to));
    report["minimum_id"] = source->id;
  }
  const RunConfig cfg{"embed",
                      {{"db_from", o.db_from}, {"nh_to", o.nh_to}, {"output", o.output},
                       {"min_id", o.min_id ? nlohmann::json(*o.min_id) : nlohmann::json()}}};
  report["provenance"] = artifact_provenance(cfg, db);
  if (!o.output.empty()) write_file(o.output, [&](std::ostream& f) { f << report.dump(2) << "\n"; });
  nlohmann::json shown = report;
  shown.erase("provenance");
  out << shown.dump(2) << "\n";
  if (o.check && !passed) {
    err << "error: embedded point is not a non-degenerate saddle of index N_h - 2\n";
    return kVerifyFailed;
  }
  return kOk;
}

// verify ----------------------------------------------------------------

struct VerifyOptions {
  std::string db;
  double cutoff = 1e-10;
  std::string report;
  bool quiet = false;
};

int cmd_verify(const VerifyOptions& o, int threads, std::ostream& out, std::ostream& err) {
  if (!(o.cutoff > 0.0)) throw UsageError("--cutoff must be > 0");
  const LandscapeDB db = open_db(o.db);
  ConnectSettings s;
  s.threads = threads;
  const VerifyReport r = verify_landscape(db, o.cutoff, s, o.quiet ? nullptr : &err);
  const RunConfig cfg{"verify", {{"db", o.db}, {"cutoff", o.cutoff}, {"report", o.report}}};
  if (!o.report.empty()) {
    nlohmann::json j;
    j["provenance"] = artifact_provenance(cfg, db);
    j["points_checked"] = r.points_checked;
    j["certificate_failures"] = r.certificate_failures;
    j["new_minima"] = r.new_minima;
    j["new_transition_states"] = r.new_transition_states;
    j["passed"] = r.passed();
    write_file(o.report, [&](std::ostream& f) { f << j.dump(2) << "\n"; });
  }
  out << "points checked: " << r.points_checked << "\n"
      << "certificate failures: " << r.certificate_failures.size() << "\n"
      << "new minima: " << r.new_minima << "\n"
      << "new transition states: " << r.new_transition_states << "\n";
  for (const auto& f : r.certificate_failures) err << "failure: " << f << "\n";
  out << (r.passed() ? "PASS" : "FAIL") << "\n";
  return r.passed() ? kOk : kVerifyFailed;
}

// show ------------------------------------------------------------------

struct ShowOptions {
  std::string db;
  bool canonicalize = false;
};

int cmd_show(const ShowOptions& o, std::ostream& out) {
  const LandscapeDB db = open_db(o.db);
  out << "# N_h=" << db.meta().n_hidden << " lambda=" << format_double(db.meta().lambda) << "\n";
  out << "id\tkind\tloss\tindex\tauc\tconnected\tquality\n";
  auto row = [&](const StationaryPoint& p) {
    const bool is_min = p.kind == PointKind::minimum;
    out << p.id << "\t" << to_string(p.kind) << "\t" << fmt("%.15e", p.loss) << "\t" << p.index << "\t"
        << auc(p.params) << "\t" << sparsity(p.params).connected_count << "\t"
        << (is_min ? to_string(classify(p.params)) : "-") << "\n";
    if (o.canonicalize) {
      const WeightVector c = canonicalize(p.params);
      out << "#";
      for (int a = 0; a < c.layout().dim(); ++a) out << " " << fmt("%.10g", c[a]);
      out << "\n";
    }
  };
  for (const auto& p : db.minima()) row(p);
  for (const auto& p : db.transition_states()) row(p);
  for (const auto& p : db.higher_index()) row(p);
  out << "# edges " << db.edges().size() << " components " << components(db).size() << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Loss-landscape explorer for small XOR tanh networks", "xorland"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1, 1);
  int threads = default_thread_count();
  app.add_option("--threads", threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  ExploreOptions explore;
  auto* c_explore = app.add_subcommand("explore", "Basin-hopping search for minima");
  c_explore->add_option("--nh", explore.nh, "Hidden units")->required();
  c_explore->add_option("--lambda", explore.lambda, "L2 regularization strength")->required();
  c_explore->add_option("--db", explore.db, "Database directory")->required();
  c_explore->add_option("--chains", explore.chains, "Independent chains")->capture_default_str();
  c_explore->add_option("--saturation-window", explore.window,
                        "Accepted steps without a new minimum needed to call the search saturated "
                        "(0: skip the check)")
      ->capture_default_str();
  c_explore->add_option("--log", explore.log, "Write per-step lines to this file");
  explore.chain.add_to(c_explore);

  SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Explore every (N_h, lambda) cell until saturation");
  c_sweep->add_option("--nh", sweep.nh, "Hidden-unit counts")->required()->delimiter(',');
  c_sweep->add_option("--lambda", sweep.lambda, "Regularization strengths")->required()->delimiter(',');
  c_sweep->add_option("--out", sweep.out, "Output directory")->required();
  c_sweep->add_option("--max-chains", sweep.max_chains)->capture_default_str();
  c_sweep->add_option("--saturation-window", sweep.window)->capture_default_str();
  sweep.chain.add_to(c_sweep);

  ConnectOptions connect;
  auto* c_connect = app.add_subcommand("connect", "Find transition states between stored minima");
  c_connect->add_option("--db", connect.db)->required();
  c_connect->add_option("--max-pairs", connect.max_pairs)->capture_default_str();
  c_connect->add_flag("--new-pairs-only", connect.new_pairs_only,
                      "Skip pairs already joined by an edge");
  c_connect->add_flag("--quiet", connect.quiet, "No per-pair log lines");

  GraphOptions graph;
  auto* c_graph = app.add_subcommand("graph", "Render the disconnectivity graph");
  c_graph->add_option("--db", graph.db)->required();
  c_graph->add_option("-o,--output", graph.svg, "SVG output file")->required();
  c_graph->add_option("--dot", graph.dot, "Also write a Graphviz file");
  c_graph->add_option("--delta-e", graph.delta_e, "Threshold spacing")->check(CLI::PositiveNumber);
  c_graph->add_option("--top", graph.top, "Highest threshold");
  c_graph->add_flag("--include-trivial", graph.include_trivial, "Draw the all-zero minimum");
  c_graph->add_option("--width", graph.width)->capture_default_str();
  c_graph->add_option("--height", graph.height)->capture_default_str();
  c_graph->add_flag("--no-color", graph.no_color);
  c_graph->add_flag("--no-scale-bar", graph.no_scale_bar);

  SensitivityOptions sens;
  auto* c_sens = app.add_subcommand("sensitivity", "Network output over the input square");
  c_sens->add_option("--db", sens.db)->required();
  c_sens->add_option("--min-id", sens.min_id)->required();
  c_sens->add_option("-o,--output", sens.csv, "CSV output file")->required();
  c_sens->add_option("--pgm", sens.pgm, "Also write a grey-scale PGM image");
  c_sens->add_option("--report", sens.report, "JSON report with AUC, sparsity and robustness");

  EmbedOptions embed_opts;
  auto* c_embed = app.add_subcommand("embed", "Zero-pad a minimum into a larger network");
  c_embed->add_option("--db-from", embed_opts.db_from)->required();
  c_embed->add_option("--nh-to", embed_opts.nh_to)->required();
  c_embed->add_option("--min-id", embed_opts.min_id,
                      "Source point (default: lowest minimum with AUC 1)");
  c_embed->add_option("-o,--output", embed_opts.output, "JSON report file");
  c_embed->add_flag("--check", embed_opts.check,
                    "Exit 1 unless the result is a saddle of index N_h - 2 (N_h = 2 source)");

  VerifyOptions verify;
  auto* c_verify = app.add_subcommand("verify", "Re-certify a database at a tighter cutoff");
  c_verify->add_option("--db", verify.db)->required();
  c_verify->add_option("--cutoff", verify.cutoff)->capture_default_str();
  c_verify->add_option("--report", verify.report, "JSON report file");
  c_verify->add_flag("--quiet", verify.quiet);

  ShowOptions show;
  auto* c_show = app.add_subcommand("show", "List stored stationary points");
  c_show->add_option("--db", show.db)->required();
  c_show->add_flag("--canonicalize", show.canonicalize,
                   "Print each point's canonical symmetry representative");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*c_explore) return cmd_explore(explore, threads, out, err);
    if (*c_sweep) return cmd_sweep(sweep, threads, out, err);
    if (*c_connect) return cmd_connect(connect, threads, out, err);
    if (*c_graph) return cmd_graph(graph, out, err);
    if (*c_sens) return cmd_sensitivity(sens, threads, out, err);
    if (*c_embed) return cmd_embed(embed_opts, out, err);
    if (*c_verify) return cmd_verify(verify, threads, out, err);
    if (*c_show) return cmd_show(show, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const DbFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    // Numerical breakdowns and other failures of the computation itself.
    err << "error: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kUsage;
}

}  // namespace xorland::cli
