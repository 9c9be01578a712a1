#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "xorland");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = xorland::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("xorland_cli_" + name);
  fs::remove_all(p);
  return p;
}

const std::vector<std::string> kSmall{"--nh", "1", "--lambda", "1e-6", "--steps", "300",
                                      "--chains", "3", "--saturation-window", "0"};

std::vector<std::string> explore_args(const fs::path& db, std::vector<std::string> extra = {}) {
  std::vector<std::string> a{"explore", "--db", db.string()};
  a.insert(a.end(), kSmall.begin(), kSmall.end());
  a.insert(a.end(), extra.begin(), extra.end());
  return a;
}

}  // namespace

TEST_CASE("explore is byte-for-byte reproducible across runs and thread counts") {
  // The db path is part of the provenance, so every run writes to the same place.
  const fs::path db = dir("repro");
  auto snapshot = [&](std::vector<std::string> args) {
    fs::remove_all(db);
    REQUIRE(run(args).code == 0);
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(db)) {
      files[entry.path().filename().string()] = slurp(entry.path());
    }
    return files;
  };
  const auto first = snapshot(explore_args(db, {"--seed", "17"}));
  const auto second = snapshot(explore_args(db, {"--seed", "17"}));
  auto threaded = explore_args(db, {"--seed", "17"});
  threaded.insert(threaded.begin(), {"--threads", "3"});
  const auto third = snapshot(threaded);
  CHECK(first.size() >= 4);
  CHECK(first == second);
  CHECK(first == third);
  const auto other = snapshot(explore_args(db, {"--seed", "18"}));
  CHECK(other.at("meta.json") != first.at("meta.json"));
}

TEST_CASE("N_h = 1 pipeline: explore, connect, graph, sensitivity, embed, verify") {
  const fs::path db = dir("pipe");
  const Result e = run(explore_args(db));
  REQUIRE(e.code == 0);
  CHECK(e.out.find("distinct minima: 4") != std::string::npos);
  const std::string meta = slurp(db / "meta.json");
  CHECK(meta.find("\"seed\"") != std::string::npos);
  CHECK(meta.find("\"version\"") != std::string::npos);
  CHECK(meta.find("\"tolerances\"") != std::string::npos);

  REQUIRE(run({"connect", "--db", db.string(), "--quiet"}).code == 0);
  const Result again = run({"connect", "--db", db.string(), "--quiet"});
  CHECK(again.out.find("new transition states: 0") != std::string::npos);

  const fs::path svg = db / "tree.svg", dot = db / "tree.dot";
  REQUIRE(run({"graph", "--db", db.string(), "-o", svg.string(), "--dot", dot.string(),
               "--include-trivial"})
              .code == 0);
  const std::string picture = slurp(svg);
  CHECK(picture.find("<!-- provenance:") != std::string::npos);
  CHECK(slurp(dot).find("// provenance:") != std::string::npos);

  const fs::path csv = db / "s.csv", pgm = db / "s.pgm", report = db / "s.json";
  const Result s = run({"sensitivity", "--db", db.string(), "--min-id", "1", "-o", csv.string(),
                        "--pgm", pgm.string(), "--report", report.string()});
  REQUIRE(s.code == 0);
  CHECK(slurp(csv).rfind("# provenance:", 0) == 0);
  CHECK(slurp(pgm).find("# provenance:") != std::string::npos);
  CHECK(slurp(report).find("robustness_score") != std::string::npos);

  const Result emb = run({"embed", "--db-from", db.string(), "--nh-to", "3", "--min-id", "1"});
  CHECK(emb.code == 0);
  CHECK(emb.out.find("\"index_after\"") != std::string::npos);

  const Result v = run({"verify", "--db", db.string(), "--quiet"});
  CHECK(v.code == 0);
  CHECK(v.out.find("PASS") != std::string::npos);

  const Result show = run({"show", "--db", db.string(), "--canonicalize"});
  CHECK(show.code == 0);
  CHECK(show.out.find("transition_state") != std::string::npos);
}

TEST_CASE("graph of a one-minimum database draws one branch") {
  // With strong regularization only the origin survives.
  const fs::path db = dir("single");
  REQUIRE(run({"explore", "--db", db.string(), "--nh", "1", "--lambda", "1", "--steps", "20",
               "--chains", "1", "--saturation-window", "0"})
              .code == 0);
  const fs::path svg = db / "g.svg";
  const Result g = run({"graph", "--db", db.string(), "-o", svg.string()});
  REQUIRE(g.code == 0);
  const std::string text = slurp(svg);
  const std::regex line("<line class=\"(leaf|branch)\"");
  CHECK(std::distance(std::sregex_iterator(text.begin(), text.end(), line), std::sregex_iterator()) == 1);
  CHECK(text.find("</svg>") != std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path db = dir("codes");
  REQUIRE(run(explore_args(db)).code == 0);

  CHECK(run({}).code == 2);
  CHECK(run({"explore", "--nh", "1"}).code == 2);
  CHECK(run({"graph", "--db", db.string(), "-o", "x.svg", "--bogus"}).code == 2);
  CHECK(run({"sensitivity", "--db", db.string(), "--min-id", "999", "-o", (db / "x.csv").string()})
            .code == 2);
  CHECK(run({"explore", "--db", db.string(), "--nh", "2", "--lambda", "1e-6"}).code == 2);

  CHECK(run({"connect", "--db", (db / "missing").string()}).code == 3);
  CHECK(run({"graph", "--db", db.string(), "-o", "/nonexistent-dir/x.svg", "--include-trivial"})
            .code == 3);

  // Unconnected database: reconnection during verify finds transition states.
  CHECK(run({"verify", "--db", db.string(), "--quiet"}).code == 1);

  // Too short to reach the saturation window.
  const fs::path unsat = dir("unsat");
  const Result u = run({"explore", "--db", unsat.string(), "--nh", "2", "--lambda", "1e-6",
                        "--steps", "5", "--chains", "1"});
  CHECK(u.code == 1);
  CHECK(u.err.find("unsaturated") != std::string::npos);
  CHECK(fs::exists(unsat / "meta.json"));

  CHECK(run({"--version"}).code == 0);
}
