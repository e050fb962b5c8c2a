#pragma once

// Three-dimension task rubric, LLM labelling through a chat-style HTTP API
// (live or replayed), survey ingestion, majority vote and agreement rates.

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "common/error.hpp"
#include "corpus/corpus.hpp"

namespace aix::annotate {

enum class Dimension { How, Repetitiveness, Nature };

inline constexpr std::array<Dimension, 3> kDimensions{Dimension::How, Dimension::Repetitiveness,
                                                      Dimension::Nature};

std::string_view to_string(Dimension d);
std::optional<Dimension> parse_dimension(std::string_view text);  // case-insensitive

// Letters per dimension: How T/D, Repetitiveness R/V, Nature P/M.
std::array<char, 2> legal_labels(Dimension d);
bool is_legal(Dimension d, char label);
std::string_view label_name(Dimension d, char label);  // "Interactive", "Mental", ...

// Reply field the prompt asks for, e.g. "Label of How (T/D)".
std::string_view label_field(Dimension d);

enum class Source { Llm, Human, Author, Final };
std::string_view to_string(Source s);
std::optional<Source> parse_source(std::string_view text);

struct Annotation {
  std::string task_id;
  Dimension dimension = Dimension::How;
  char label = 0;
  Source source = Source::Llm;
  std::string annotator_id;

  bool operator==(const Annotation&) const = default;
};

struct ConsensusLabel {
  std::string task_id;
  Dimension dimension = Dimension::How;
  char label = 0;
  std::size_t support = 0;
  std::size_t n_annotators = 0;

  bool operator==(const ConsensusLabel&) const = default;
};

using ConsensusKey = std::pair<std::string, Dimension>;
using ConsensusSet = std::map<ConsensusKey, ConsensusLabel>;

// ---- prompts and replies -------------------------------------------------

std::string render_prompt(std::string_view task_text, Dimension d);

// Chat-completions request body for one prompt.
std::string build_request(std::string_view model, std::string_view prompt);

// Message text from a chat-completions response body.
std::optional<std::string> extract_content(std::string_view response_body);

// Finds the rubric label in a model reply: the first well-formed JSON object
// carrying the label field, else a "field: value" line. Illegal letters are
// rejected.
std::optional<char> parse_reply(std::string_view content, Dimension d);

// ---- transport -----------------------------------------------------------

struct CallKey {
  std::string task_id;
  Dimension dimension = Dimension::How;
  unsigned attempt = 0;

  auto operator<=>(const CallKey&) const = default;
};

struct ChatResponse {
  int status = 0;
  std::string body;
};

class ChatBackend {
public:
  virtual ~ChatBackend() = default;
  // Throws Error(ErrorKind::Network) on transport failure.
  virtual ChatResponse send(const CallKey& key, const std::string& request_body) = 0;
};

struct LlmConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string model = "gpt-4o";
  std::string api_key_env = "OPENAI_API_KEY";
  unsigned max_retries = 2;
  unsigned timeout_seconds = 60;
  unsigned concurrency = 1;
};

// POSTs to <base_url>/chat/completions. Construction fails with a Config
// error when the credential variable is unset.
std::unique_ptr<ChatBackend> make_http_backend(const LlmConfig& config);

// One NDJSON line per call: task_id, dimension, attempt, request, status,
// response (and error on transport failure).
struct ReplayRecord {
  CallKey key;
  std::string request;
  int status = 0;
  std::string response;
  std::string error;
};

std::string render_replay(std::span<const ReplayRecord> records);
std::vector<ReplayRecord> load_replay(const std::filesystem::path& path);

// Serves recorded responses by (task, dimension, attempt).
std::unique_ptr<ChatBackend> make_replay_backend(std::vector<ReplayRecord> records);

struct LlmRun {
  std::vector<Annotation> annotations;  // task order
  std::vector<std::string> missing;     // tasks without a legal label after retries
  std::vector<ReplayRecord> log;        // every call, task order then attempt
  Warnings warnings;
};

LlmRun annotate_llm(std::span<const corpus::TaskRecord> tasks, Dimension d,
                    ChatBackend& backend, const LlmConfig& config);

// ---- human and author labels --------------------------------------------

struct AnnotationFile {
  std::vector<Annotation> annotations;
  std::vector<ConsensusKey> excluded;  // groups with the wrong annotator count
  Warnings warnings;
};

// task_id,dimension,label,annotator_id. When `required_count` is set, groups
// with a different number of annotators are reported and excluded.
AnnotationFile load_annotations(const std::filesystem::path& path, Source source,
                                std::optional<std::size_t> required_count);

// Survey responses: three annotators per task and dimension.
AnnotationFile ingest_survey(const std::filesystem::path& path);

std::string render_annotations(std::span<const Annotation> annotations);

// ---- aggregation ---------------------------------------------------------

// Label with majority support. The group must share task and dimension and
// have an odd number of annotators.
ConsensusLabel majority_vote(std::span<const Annotation> group);

ConsensusSet build_consensus(std::span<const Annotation> annotations,
                             std::span<const ConsensusKey> excluded = {});

// 100 * matching labels / tasks, over one dimension. Both sets must cover the
// same tasks for that dimension.
double agreement_rate(const ConsensusSet& a, const ConsensusSet& b, Dimension d);

// Restricts both sets to the tasks they share (per dimension).
std::pair<ConsensusSet, ConsensusSet> intersect(const ConsensusSet& a, const ConsensusSet& b);

struct Alignment {
  std::size_t disagreements = 0;  // tasks where the two primary sets differ
  std::size_t adjudicated = 0;    // of those, tasks with an adjudicated label
  std::size_t aligned_with_first = 0;
  std::optional<double> rate;     // percent aligned with the first set
};

// Among tasks where `first` and `second` disagree on `d`, the share whose
// adjudicated label matches `first`.
Alignment alignment_rate(const ConsensusSet& first, const ConsensusSet& second,
                         const ConsensusSet& adjudicated, Dimension d);

// `base` with every label that `overrides` also carries replaced.
ConsensusSet merge_final(const ConsensusSet& base, const ConsensusSet& overrides);

// consensus.csv: task_id,dimension,label,support,n_annotators,source
std::string render_consensus(std::span<const std::pair<Source, const ConsensusSet*>> sets);
std::map<Source, ConsensusSet> load_consensus(const std::filesystem::path& path);

}  // namespace aix::annotate
