#pragma once

// Citation graph, the disruption index of a focal patent, the AI-patent
// filter and quartile labelling.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "common/error.hpp"
#include "corpus/corpus.hpp"

namespace aix::disruption {

// Immutable forward/backward adjacency over dense patent indices. Index order
// is the order of the patent collection it was built from.
class CitationGraph {
public:
  static CitationGraph build(std::span<const corpus::Patent> patents,
                             std::span<const corpus::CitationEdge> edges);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return forward_.size(); }

  std::optional<std::size_t> find(std::string_view id) const;
  const std::string& id(std::size_t node) const { return ids_[node]; }
  corpus::Date grant_date(std::size_t node) const { return dates_[node]; }

  // Later work citing `node` (sorted by index).
  std::span<const std::uint32_t> citers(std::size_t node) const {
    return slice(forward_, forward_offsets_, node);
  }
  // Prior work cited by `node` (sorted by index).
  std::span<const std::uint32_t> references(std::size_t node) const {
    return slice(backward_, backward_offsets_, node);
  }

private:
  static std::span<const std::uint32_t> slice(const std::vector<std::uint32_t>& data,
                                              const std::vector<std::size_t>& offsets,
                                              std::size_t node) {
    return {data.data() + offsets[node], offsets[node + 1] - offsets[node]};
  }

  std::vector<std::string> ids_;
  std::vector<corpus::Date> dates_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::size_t> forward_offsets_, backward_offsets_;
  std::vector<std::uint32_t> forward_, backward_;
};

struct DisruptionCounts {
  std::uint64_t n_i = 0;  // later citers of the focal only
  std::uint64_t n_j = 0;  // later citers of the focal and at least one reference
  std::uint64_t n_k = 0;  // later citers of references but not the focal

  bool operator==(const DisruptionCounts&) const = default;
};

// (n_i - n_j) / (n_i + n_j + n_k); nullopt when nothing cites the focal or
// its references.
std::optional<double> disruption_index(const DisruptionCounts& counts);

// "Later" means a strictly greater grant date. Throws for an unknown focal.
DisruptionCounts disruption_counts(const CitationGraph& graph, std::string_view focal);

struct DisruptionScore {
  std::string patent_id;
  DisruptionCounts counts;
  std::optional<double> d;

  bool operator==(const DisruptionScore&) const = default;
};

// One score per patent, in graph order.
std::vector<DisruptionScore> score_all(const CitationGraph& graph, unsigned threads = 1);

struct FilterConfig {
  int year_min = 2015;
  int year_max = 2019;
  std::size_t min_forward_citations = 3;
  std::size_t min_references = 1;
  std::vector<std::string> keywords;
  std::vector<std::string> cpc_prefixes;
};

// The fifteen AI keywords used to select AI patents.
std::vector<std::string> default_ai_keywords();

FilterConfig default_filter_config();

// Lowercases, maps every non-alphanumeric byte to a space and collapses runs.
std::string normalize_text(std::string_view text);

// Whole-phrase keyword match on title and abstract.
bool matches_keywords(const corpus::Patent& patent, std::span<const std::string> keywords);

// Patent ids passing every filter clause, in input order.
std::vector<std::string> filter_ai_patents(std::span<const corpus::Patent> patents,
                                           const FilterConfig& config,
                                           const CitationGraph& graph);

enum class PatentClass { Disruptive, Consolidating, Middle };

std::string_view to_string(PatentClass c);
std::optional<PatentClass> parse_patent_class(std::string_view text);

struct Classification {
  std::map<std::string, PatentClass> classes;  // defined scores only
  double q_low = 0.0;
  double q_high = 0.0;
  std::vector<std::string> undefined;  // excluded ids
  Warnings warnings;
};

// Nearest-rank quartile cut-offs over the defined scores. d >= q_high is
// Disruptive, d <= q_low Consolidating; a score meeting both is Middle.
Classification classify_patents(std::span<const DisruptionScore> scores,
                                double low_percent = 25.0, double high_percent = 75.0);

// scores.csv: patent_id,n_i,n_j,n_k,d,class
std::string render_scores(std::span<const DisruptionScore> scores,
                          const Classification& classification);

struct ScoreRow {
  DisruptionScore score;
  std::string label;  // class column as written
};
std::vector<ScoreRow> load_scores(const std::filesystem::path& path);

}  // namespace aix::disruption
