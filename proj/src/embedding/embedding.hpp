#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "disruption/disruption.hpp"

namespace aix::embedding {

// Sidecar written next to an embedding file by the encoder:
// <file>.manifest.json with model, dim, count and the file's sha256.
struct StoreManifest {
  std::string model;
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  std::string sha256;
};

std::filesystem::path manifest_path(const std::filesystem::path& store_path);

// Ordered id -> float32 vector map with a fixed dimension. Vectors are kept
// exactly as written; nothing is renormalised.
//
// On-disk layout (little endian): "EMB1", u32 dim, u64 count, then per entry
// u32 id byte length, id bytes, dim float32 values.
class EmbeddingStore {
public:
  explicit EmbeddingStore(std::uint32_t dim);

  std::uint32_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  void add(std::string id, std::span<const float> vector);

  const std::string& id(std::size_t i) const { return ids_[i]; }
  std::span<const float> vector(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::optional<std::size_t> find(std::string_view id) const;

  // Entries whose id is in `ids`, in this store's order.
  EmbeddingStore subset(std::span<const std::string> ids) const;

  static EmbeddingStore read(std::istream& in, const std::string& source = "embedding stream");
  void write(std::ostream& out) const;

  // Loads and, when a sidecar manifest exists, checks dim/count/hash against it.
  static EmbeddingStore load(const std::filesystem::path& path,
                             StoreManifest* manifest = nullptr);
  void save(const std::filesystem::path& path) const;

  bool operator==(const EmbeddingStore&) const = default;

private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

void write_manifest(const std::filesystem::path& store_path, const StoreManifest& manifest);
std::optional<StoreManifest> read_manifest(const std::filesystem::path& store_path);

// dot(u, v) / sqrt(|u|^2 |v|^2) accumulated in double, clamped to [-1, 1].
// Taking one square root of the product makes cosine(v, v) exactly 1.
double cosine(std::span<const float> u, std::span<const float> v);

// Squared Euclidean norm accumulated in double, the same way cosine() does it.
double squared_norm(std::span<const float> v);

struct MatchResult {
  std::string task_id;
  std::string best_patent_id;
  double best_similarity = 0.0;

  bool operator==(const MatchResult&) const = default;
};

// Best patent per task; ties go to the lexicographically smallest patent id.
std::vector<MatchResult> match_tasks(const EmbeddingStore& tasks, const EmbeddingStore& patents,
                                     unsigned threads = 1);

// Nearest-rank percentile of the per-task best similarities.
double impact_threshold(std::span<const MatchResult> results, double percent = 90.0);

enum class TaskImpact { Disruptive, Consolidating, Middle, NotImpacted };

std::string_view to_string(TaskImpact impact);
std::optional<TaskImpact> parse_task_impact(std::string_view text);
TaskImpact impact_from_class(disruption::PatentClass c);
bool is_impacted(TaskImpact impact);

// Strictly above the threshold is impacted, labelled by the matched patent.
std::map<std::string, TaskImpact> classify_tasks(
    std::span<const MatchResult> results, double threshold,
    const std::map<std::string, disruption::PatentClass>& patent_classes);

// best_matches.csv: task_id,best_patent_id,best_similarity
std::string render_best_matches(std::span<const MatchResult> results);
std::vector<MatchResult> load_best_matches(const std::filesystem::path& path);

struct LabeledMatch {
  MatchResult match;
  TaskImpact label;
};

// matches.csv: task_id,best_patent_id,best_similarity,label
std::string render_matches(std::span<const MatchResult> results,
                           const std::map<std::string, TaskImpact>& labels);
std::vector<LabeledMatch> load_matches(const std::filesystem::path& path);

}  // namespace aix::embedding
