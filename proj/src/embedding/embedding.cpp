#include "embedding/embedding.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "common/csv.hpp"
#include "common/hash.hpp"
#include "common/io.hpp"
#include "common/parallel.hpp"
#include "common/percentile.hpp"

namespace aix::embedding {

namespace {

constexpr std::array<char, 4> kMagic{'E', 'M', 'B', '1'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& source, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
    fail(ErrorKind::Data, "{}: truncated while reading {}", source, what);
  return to_little(v);
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& store_path) {
  auto p = store_path;
  p += ".manifest.json";
  return p;
}

EmbeddingStore::EmbeddingStore(std::uint32_t dim) : dim_(dim) {
  if (dim == 0) fail(ErrorKind::Data, "embedding dimension must be positive");
}

void EmbeddingStore::add(std::string id, std::span<const float> vector) {
  if (vector.size() != dim_)
    fail(ErrorKind::Data, "vector for '{}' has length {}, store dimension is {}", id,
         vector.size(), dim_);
  if (index_.contains(id)) fail(ErrorKind::Data, "duplicate embedding id '{}'", id);
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::optional<std::size_t> EmbeddingStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EmbeddingStore EmbeddingStore::subset(std::span<const std::string> ids) const {
  std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
  EmbeddingStore out(dim_);
  for (std::size_t i = 0; i < size(); ++i)
    if (wanted.contains(ids_[i])) out.add(ids_[i], vector(i));
  return out;
}

EmbeddingStore EmbeddingStore::read(std::istream& in, const std::string& source) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 4 || magic != kMagic)
    fail(ErrorKind::Data, "{}: not an EMB1 embedding file (bad magic)", source);
  auto dim = get<std::uint32_t>(in, source, "dimension");
  auto count = get<std::uint64_t>(in, source, "count");
  if (dim == 0) fail(ErrorKind::Data, "{}: dimension is zero", source);

  EmbeddingStore store(dim);
  std::vector<float> vec(dim);
  for (std::uint64_t e = 0; e < count; ++e) {
    auto len = get<std::uint32_t>(in, source, "id length");
    std::string id(len, '\0');
    in.read(id.data(), len);
    if (in.gcount() != static_cast<std::streamsize>(len))
      fail(ErrorKind::Data, "{}: truncated id in entry {}", source, e);
    if (id.empty()) fail(ErrorKind::Data, "{}: empty id in entry {}", source, e);
    for (auto& x : vec) {
      x = std::bit_cast<float>(get<std::uint32_t>(in, source, "vector"));
      if (!std::isfinite(x))
        fail(ErrorKind::Data, "{}: non-finite component in vector '{}'", source, id);
    }
    if (store.index_.contains(id))
      fail(ErrorKind::Data, "{}: duplicate id '{}' in entry {}", source, id, e);
    store.add(std::move(id), vec);
  }
  if (in.peek() != std::char_traits<char>::eof())
    fail(ErrorKind::Data, "{}: trailing bytes after {} entries", source, count);
  return store;
}

void EmbeddingStore::write(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, dim_);
  put<std::uint64_t>(out, ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ids_[i].size()));
    out.write(ids_[i].data(), static_cast<std::streamsize>(ids_[i].size()));
    for (float x : vector(i)) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  }
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path, StoreManifest* manifest) {
  std::string bytes = io::read_file(path);
  std::istringstream in(bytes);
  auto store = read(in, path.filename().string());
  if (auto m = read_manifest(path)) {
    if (m->dim != store.dim() || m->count != store.size())
      fail(ErrorKind::Data, "{}: manifest says dim={} count={}, file has dim={} count={}",
           path.filename().string(), m->dim, m->count, store.dim(), store.size());
    if (!m->sha256.empty() && m->sha256 != sha256_hex(bytes))
      fail(ErrorKind::Data, "{}: content hash does not match its manifest",
           path.filename().string());
    if (manifest) *manifest = *m;
  }
  return store;
}

void EmbeddingStore::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  write(out);
  io::write_file(path, out.str());
}

void write_manifest(const std::filesystem::path& store_path, const StoreManifest& m) {
  nlohmann::ordered_json j;
  j["model"] = m.model;
  j["dim"] = m.dim;
  j["count"] = m.count;
  j["sha256"] = m.sha256;
  io::write_file(manifest_path(store_path), j.dump(2) + "\n");
}

std::optional<StoreManifest> read_manifest(const std::filesystem::path& store_path) {
  auto p = manifest_path(store_path);
  if (!std::filesystem::exists(p)) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(io::read_file(p));
    StoreManifest m;
    m.model = j.value("model", "");
    m.dim = j.at("dim").get<std::uint32_t>();
    m.count = j.at("count").get<std::uint64_t>();
    m.sha256 = j.value("sha256", "");
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Data, "{}: malformed manifest: {}", p.filename().string(), e.what());
  }
}

double squared_norm(std::span<const float> v) {
  double ss = 0.0;
  for (float x : v) ss += static_cast<double>(x) * static_cast<double>(x);
  return ss;
}

namespace {

double dot(std::span<const float> u, std::span<const float> v) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    acc += static_cast<double>(u[k]) * static_cast<double>(v[k]);
  return acc;
}

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

}  // namespace

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size())
    fail(ErrorKind::Data, "cosine of vectors with dimensions {} and {}", u.size(), v.size());
  const double uu = squared_norm(u);
  const double vv = squared_norm(v);
  if (uu == 0.0 || vv == 0.0) fail(ErrorKind::Data, "cosine of a zero vector");
  return clamp_unit(dot(u, v) / std::sqrt(uu * vv));
}

std::vector<MatchResult> match_tasks(const EmbeddingStore& tasks, const EmbeddingStore& patents,
                                     unsigned threads) {
  if (tasks.dim() != patents.dim())
    fail(ErrorKind::Data, "task dimension {} differs from patent dimension {}", tasks.dim(),
         patents.dim());
  if (tasks.empty() || patents.empty())
    fail(ErrorKind::Data, "matching needs at least one task and one patent");

  std::vector<double> patent_norms(patents.size());
  for (std::size_t p = 0; p < patents.size(); ++p) {
    patent_norms[p] = squared_norm(patents.vector(p));
    if (patent_norms[p] == 0.0)
      fail(ErrorKind::Data, "patent '{}' has a zero embedding", patents.id(p));
  }

  std::vector<MatchResult> out(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const auto tv = tasks.vector(t);
    const double tn = squared_norm(tv);
    if (tn == 0.0) fail(ErrorKind::Data, "task '{}' has a zero embedding", tasks.id(t));
    std::size_t best = 0;
    double best_sim = -2.0;
    for (std::size_t p = 0; p < patents.size(); ++p) {
      const double sim = clamp_unit(dot(tv, patents.vector(p)) / std::sqrt(tn * patent_norms[p]));
      if (sim > best_sim || (sim == best_sim && patents.id(p) < patents.id(best))) {
        best = p;
        best_sim = sim;
      }
    }
    out[t] = MatchResult{tasks.id(t), patents.id(best), best_sim};
  });
  return out;
}

double impact_threshold(std::span<const MatchResult> results, double percent) {
  if (results.size() < 10)
    fail(ErrorKind::Data, "impact threshold needs at least 10 matched tasks, got {}",
         results.size());
  std::vector<double> best;
  best.reserve(results.size());
  for (const auto& r : results) best.push_back(r.best_similarity);
  return nearest_rank_value(best, percent);
}

std::string_view to_string(TaskImpact impact) {
  switch (impact) {
    case TaskImpact::Disruptive: return "disruptive";
    case TaskImpact::Consolidating: return "consolidating";
    case TaskImpact::Middle: return "middle";
    case TaskImpact::NotImpacted: return "not_impacted";
  }
  return "not_impacted";
}

std::optional<TaskImpact> parse_task_impact(std::string_view text) {
  for (auto v : {TaskImpact::Disruptive, TaskImpact::Consolidating, TaskImpact::Middle,
                 TaskImpact::NotImpacted})
    if (text == to_string(v)) return v;
  return std::nullopt;
}

TaskImpact impact_from_class(disruption::PatentClass c) {
  switch (c) {
    case disruption::PatentClass::Disruptive: return TaskImpact::Disruptive;
    case disruption::PatentClass::Consolidating: return TaskImpact::Consolidating;
    case disruption::PatentClass::Middle: return TaskImpact::Middle;
  }
  return TaskImpact::Middle;
}

bool is_impacted(TaskImpact impact) { return impact != TaskImpact::NotImpacted; }

std::map<std::string, TaskImpact> classify_tasks(
    std::span<const MatchResult> results, double threshold,
    const std::map<std::string, disruption::PatentClass>& patent_classes) {
  std::map<std::string, TaskImpact> out;
  for (const auto& r : results) {
    auto it = patent_classes.find(r.best_patent_id);
    if (it == patent_classes.end())
      fail(ErrorKind::Data, "matched patent '{}' of task '{}' has no class", r.best_patent_id,
           r.task_id);
    out[r.task_id] =
        r.best_similarity > threshold ? impact_from_class(it->second) : TaskImpact::NotImpacted;
  }
  return out;
}

std::string render_best_matches(std::span<const MatchResult> results) {
  csv::Writer w{"task_id", "best_patent_id", "best_similarity"};
  for (const auto& r : results)
    w.row({r.task_id, r.best_patent_id, csv::format_double(r.best_similarity)});
  return w.str();
}

std::vector<MatchResult> load_best_matches(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"task_id", "best_patent_id", "best_similarity"});
  std::vector<MatchResult> out;
  out.reserve(table.size());
  for (const auto& rec : table.records())
    out.push_back({rec.fields[0], rec.fields[1], csv::parse_double(table, rec, 2)});
  return out;
}

std::string render_matches(std::span<const MatchResult> results,
                           const std::map<std::string, TaskImpact>& labels) {
  csv::Writer w{"task_id", "best_patent_id", "best_similarity", "label"};
  for (const auto& r : results)
    w.row({r.task_id, r.best_patent_id, csv::format_double(r.best_similarity),
           to_string(labels.at(r.task_id))});
  return w.str();
}

std::vector<LabeledMatch> load_matches(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"task_id", "best_patent_id", "best_similarity", "label"});
  std::vector<LabeledMatch> out;
  out.reserve(table.size());
  for (const auto& rec : table.records()) {
    auto label = parse_task_impact(rec.fields[3]);
    if (!label)
      throw DataError(table.source(), rec.line, "label",
                      fmt::format("unknown impact label '{}'", rec.fields[3]));
    out.push_back({{rec.fields[0], rec.fields[1], csv::parse_double(table, rec, 2)}, *label});
  }
  return out;
}

}  // namespace aix::embedding
