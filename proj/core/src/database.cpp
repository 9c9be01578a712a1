#include "xorland/database.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "xorland/union_find.hpp"

namespace xorland {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(PointKind kind) {
  switch (kind) {
    case PointKind::minimum:
      return "minimum";
    case PointKind::transition_state:
      return "transition_state";
    case PointKind::higher_index:
      return "higher_index";
  }
  return "unknown";
}

PointKind point_kind_from_string(const std::string& text) {
  if (text == "minimum") return PointKind::minimum;
  if (text == "transition_state") return PointKind::transition_state;
  if (text == "higher_index") return PointKind::higher_index;
  throw std::invalid_argument("unknown point kind '" + text + "'");
}

StationaryPoint characterize(const WeightVector& w, const LossConfig& config,
                             double zero_cutoff) {
  const Spectrum spec = spectrum(w, config, zero_cutoff);
  StationaryPoint p;
  p.params = w;
  p.loss = loss(w, config);
  p.grad_rms = rms(gradient(w, config));
  p.eigenvalues = spec.eigenvalues;
  p.index = spec.index;
  p.zero_count = spec.zero_count;
  p.kind = spec.index == 0   ? PointKind::minimum
           : spec.index == 1 ? PointKind::transition_state
                             : PointKind::higher_index;
  if (is_trivial(w)) p.tags.insert(kTrivialTag);
  return p;
}

bool is_trivial(const WeightVector& w, double threshold) {
  return w.values().cwiseAbs().maxCoeff() <= threshold;
}

void certify(const StationaryPoint& point, double zero_cutoff) {
  auto fail = [&](const std::string& why) {
    throw CertificateError("certificate failed for " + to_string(point.kind) +
                               (point.id >= 0 ? " id " + std::to_string(point.id) : "") + ": " +
                               why,
                           point.eigenvalues);
  };
  if (!(point.grad_rms < kStationaryGradTol)) {
    fail("grad RMS " + format_double(point.grad_rms) + " not below 1e-9");
  }
  if (point.eigenvalues.size() != point.params.dim()) fail("eigenvalue count mismatch");
  for (Eigen::Index a = 1; a < point.eigenvalues.size(); ++a) {
    if (point.eigenvalues[a] < point.eigenvalues[a - 1]) fail("eigenvalues not ascending");
  }
  const int index = count_negative(point.eigenvalues, zero_cutoff);
  const int zeros = count_zero(point.eigenvalues, zero_cutoff);
  if (zeros != 0) fail(std::to_string(zeros) + " zero eigenvalue(s)");
  if (index != point.index || zeros != point.zero_count) fail("stored index disagrees with spectrum");
  switch (point.kind) {
    case PointKind::minimum:
      if (index != 0) fail("index " + std::to_string(index) + " for a minimum");
      break;
    case PointKind::transition_state:
      if (index != 1) fail("index " + std::to_string(index) + " for a transition state");
      break;
    case PointKind::higher_index:
      if (index < 2) fail("index " + std::to_string(index) + " for a higher-index point");
      break;
  }
}

std::vector<StationaryPoint>& LandscapeDB::bucket(PointKind kind) {
  switch (kind) {
    case PointKind::minimum:
      return minima_;
    case PointKind::transition_state:
      return ts_;
    case PointKind::higher_index:
      break;
  }
  return higher_;
}

const std::vector<StationaryPoint>& LandscapeDB::bucket(PointKind kind) const {
  return const_cast<LandscapeDB*>(this)->bucket(kind);
}

bool LandscapeDB::same_key(double a, double b) const {
  return std::abs(a - b) <= meta_.dedupe_tol * std::max(1.0, std::abs(a));
}

std::optional<int> LandscapeDB::match(PointKind kind, double loss) const {
  for (const auto& p : bucket(kind)) {
    if (same_key(p.loss, loss)) return p.id;
  }
  return std::nullopt;
}

InsertOutcome LandscapeDB::insert_dedupe(StationaryPoint point) {
  if (point.params.layout().n_hidden() != meta_.n_hidden) {
    throw std::invalid_argument("insert_dedupe: point has N_h=" +
                                std::to_string(point.params.layout().n_hidden()) +
                                ", database has N_h=" + std::to_string(meta_.n_hidden));
  }
  certify(point, meta_.zero_cutoff);
  auto& points = bucket(point.kind);
  for (auto& existing : points) {
    if (same_key(existing.loss, point.loss)) {
      existing.tags.insert(point.tags.begin(), point.tags.end());
      return {existing.id, false};
    }
  }
  point.id = next_id_++;
  points.push_back(std::move(point));
  return {points.back().id, true};
}

bool LandscapeDB::add_edge(int ts_id, int min_a, int min_b) {
  const StationaryPoint& ts = at(ts_id);
  const StationaryPoint& a = at(min_a);
  const StationaryPoint& b = at(min_b);
  if (ts.kind != PointKind::transition_state || a.kind != PointKind::minimum ||
      b.kind != PointKind::minimum) {
    throw std::invalid_argument("add_edge: expected (transition state, minimum, minimum)");
  }
  if (ts.loss < a.loss || ts.loss < b.loss) {
    throw std::invalid_argument("add_edge: transition state below a connected minimum");
  }
  if (min_b < min_a) std::swap(min_a, min_b);
  const Edge edge{ts_id, min_a, min_b};
  if (std::find(edges_.begin(), edges_.end(), edge) != edges_.end()) return false;
  edges_.push_back(edge);
  return true;
}

const StationaryPoint* LandscapeDB::find(int id) const {
  for (const auto* points : {&minima_, &ts_, &higher_}) {
    auto it = std::lower_bound(points->begin(), points->end(), id,
                               [](const StationaryPoint& p, int v) { return p.id < v; });
    if (it != points->end() && it->id == id) return &*it;
  }
  return nullptr;
}

const StationaryPoint& LandscapeDB::at(int id) const {
  const StationaryPoint* p = find(id);
  if (p == nullptr) throw std::out_of_range("no stationary point with id " + std::to_string(id));
  return *p;
}

void LandscapeDB::restore(StationaryPoint point, int next_id) {
  certify(point, meta_.zero_cutoff);
  auto& points = bucket(point.kind);
  if (!points.empty() && points.back().id >= point.id) {
    throw DbFormatError("ids not strictly increasing in " + to_string(point.kind) + " records");
  }
  next_id_ = std::max(next_id_, std::max(next_id, point.id + 1));
  points.push_back(std::move(point));
}

std::vector<std::vector<int>> components(const LandscapeDB& db) {
  const auto& minima = db.minima();
  std::map<int, std::size_t> slot;
  for (std::size_t s = 0; s < minima.size(); ++s) slot[minima[s].id] = s;
  UnionFind uf(minima.size());
  for (const Edge& e : db.edges()) uf.unite(slot.at(e.min_a), slot.at(e.min_b));
  std::map<std::size_t, std::vector<int>> groups;
  for (std::size_t s = 0; s < minima.size(); ++s) groups[uf.find(s)].push_back(minima[s].id);
  std::vector<std::vector<int>> out;
  for (auto& [root, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw std::invalid_argument("not a decimal floating-point value: '" + text + "'");
  }
  return value;
}

namespace {

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kMinimaFile = "minima.jsonl";
constexpr const char* kTsFile = "ts.jsonl";
constexpr const char* kHigherFile = "higher_index.jsonl";
constexpr const char* kEdgesFile = "edges.tsv";

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index a = 0; a < v.size(); ++a) arr.push_back(format_double(v[a]));
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t a = 0; a < arr.size(); ++a) {
    v[static_cast<Eigen::Index>(a)] = parse_double(arr.at(a).get<std::string>());
  }
  return v;
}

std::string point_to_line(const StationaryPoint& p) {
  json rec;
  rec["id"] = p.id;
  rec["kind"] = to_string(p.kind);
  rec["loss"] = format_double(p.loss);
  rec["grad_rms"] = format_double(p.grad_rms);
  rec["index"] = p.index;
  rec["zero_count"] = p.zero_count;
  rec["eigenvalues"] = vector_to_json(p.eigenvalues);
  rec["params"] = vector_to_json(p.params.values());
  rec["tags"] = json(std::vector<std::string>(p.tags.begin(), p.tags.end()));
  return rec.dump() + "\n";
}

StationaryPoint point_from_line(const std::string& line, const Layout& layout) {
  const json rec = json::parse(line);
  StationaryPoint p;
  p.params = WeightVector(layout, vector_from_json(rec.at("params")));
  p.id = rec.at("id").get<int>();
  p.kind = point_kind_from_string(rec.at("kind").get<std::string>());
  p.loss = parse_double(rec.at("loss").get<std::string>());
  p.grad_rms = parse_double(rec.at("grad_rms").get<std::string>());
  p.index = rec.at("index").get<int>();
  p.zero_count = rec.at("zero_count").get<int>();
  p.eigenvalues = vector_from_json(rec.at("eigenvalues"));
  for (const auto& t : rec.at("tags")) p.tags.insert(t.get<std::string>());
  return p;
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << bytes;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DbFormatError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string points_to_text(const std::vector<StationaryPoint>& points) {
  std::string text;
  for (const auto& p : points) text += point_to_line(p);
  return text;
}

template <class Fn>
void for_each_line(const std::string& text, const std::string& file, Fn&& fn) {
  if (!text.empty() && text.back() != '\n') {
    throw DbFormatError(file + ": missing trailing newline");
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    try {
      fn(line, lineno);
    } catch (const DbFormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw DbFormatError(file + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
    }
  }
}

}  // namespace

void save(const LandscapeDB& db, const fs::path& directory) {
  fs::create_directories(directory);
  std::map<std::string, std::string> files;
  files[kMinimaFile] = points_to_text(db.minima());
  files[kTsFile] = points_to_text(db.transition_states());
  if (!db.higher_index().empty()) files[kHigherFile] = points_to_text(db.higher_index());
  std::string edges = "ts_id\tmin_a\tmin_b\n";
  for (const Edge& e : db.edges()) {
    edges += std::to_string(e.ts_id) + "\t" + std::to_string(e.min_a) + "\t" +
             std::to_string(e.min_b) + "\n";
  }
  files[kEdgesFile] = edges;

  const DbMeta& m = db.meta();
  json meta;
  meta["format_version"] = kDbFormatVersion;
  meta["n_hidden"] = m.n_hidden;
  meta["lambda"] = format_double(m.lambda);
  meta["zero_cutoff"] = format_double(m.zero_cutoff);
  meta["dedupe_tol"] = format_double(m.dedupe_tol);
  meta["next_id"] = db.next_id();
  meta["provenance"] = m.provenance;
  json sums = json::object();
  for (const auto& [name, bytes] : files) sums[name] = fnv1a_hex(bytes);
  meta["checksums"] = sums;

  if (!files.count(kHigherFile)) fs::remove(directory / kHigherFile);
  for (const auto& [name, bytes] : files) write_file(directory / name, bytes);
  write_file(directory / kMetaFile, meta.dump(2) + "\n");
}

LandscapeDB load(const fs::path& directory) {
  if (!fs::is_directory(directory)) {
    throw DbFormatError("database directory " + directory.string() + " does not exist");
  }
  if (!fs::exists(directory / kMetaFile)) {
    throw DbFormatError("no " + std::string(kMetaFile) + " in " + directory.string());
  }
  json meta;
  try {
    meta = json::parse(read_file(directory / kMetaFile));
  } catch (const json::exception& e) {
    throw DbFormatError(std::string(kMetaFile) + ": " + e.what());
  }
  DbMeta m;
  json checksums;
  int next_id = 0;
  try {
    const int version = meta.at("format_version").get<int>();
    if (version != kDbFormatVersion) {
      throw DbFormatError("format version mismatch: file has " + std::to_string(version) +
                          ", expected " + std::to_string(kDbFormatVersion));
    }
    m.n_hidden = meta.at("n_hidden").get<int>();
    m.lambda = parse_double(meta.at("lambda").get<std::string>());
    m.zero_cutoff = parse_double(meta.at("zero_cutoff").get<std::string>());
    m.dedupe_tol = parse_double(meta.at("dedupe_tol").get<std::string>());
    m.provenance = meta.at("provenance");
    next_id = meta.at("next_id").get<int>();
    checksums = meta.at("checksums");
  } catch (const DbFormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw DbFormatError(std::string(kMetaFile) + ": " + e.what());
  }

  LandscapeDB db(m);
  const Layout layout(m.n_hidden);
  for (const char* name : {kMinimaFile, kTsFile, kHigherFile}) {
    const bool required = std::string(name) != kHigherFile;
    if (!fs::exists(directory / name)) {
      if (required) throw DbFormatError("missing " + std::string(name));
      continue;
    }
    const std::string text = read_file(directory / name);
    if (!checksums.contains(name) || checksums.at(name).get<std::string>() != fnv1a_hex(text)) {
      throw DbFormatError(std::string(name) + ": checksum mismatch");
    }
    for_each_line(text, name, [&](const std::string& line, int lineno) {
      StationaryPoint p = point_from_line(line, layout);
      try {
        db.restore(std::move(p), next_id);
      } catch (const CertificateError& e) {
        throw DbFormatError(std::string(name) + ":" + std::to_string(lineno) + ": " + e.what());
      }
    });
  }

  const std::string edges = read_file(directory / kEdgesFile);
  if (!checksums.contains(kEdgesFile) ||
      checksums.at(kEdgesFile).get<std::string>() != fnv1a_hex(edges)) {
    throw DbFormatError(std::string(kEdgesFile) + ": checksum mismatch");
  }
  for_each_line(edges, kEdgesFile, [&](const std::string& line, int lineno) {
    if (lineno == 1) {
      if (line != "ts_id\tmin_a\tmin_b") throw DbFormatError("edges.tsv:1: bad header");
      return;
    }
    std::istringstream fields(line);
    Edge e;
    std::string extra;
    if (!(fields >> e.ts_id >> e.min_a >> e.min_b) || (fields >> extra)) {
      throw DbFormatError("edges.tsv:" + std::to_string(lineno) + ": malformed line");
    }
    db.at(e.ts_id);
    db.at(e.min_a);
    db.at(e.min_b);
    db.restore_edge(e);
  });
  return db;
}

}  // namespace xorland
