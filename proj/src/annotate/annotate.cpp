#include "annotate/annotate.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "annotate/prompts.hpp"
#include "common/csv.hpp"
#include "common/io.hpp"
#include "common/parallel.hpp"

namespace aix::annotate {

using nlohmann::json;

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::How: return "How";
    case Dimension::Repetitiveness: return "Repetitiveness";
    case Dimension::Nature: return "Nature";
  }
  return "How";
}

std::optional<Dimension> parse_dimension(std::string_view text) {
  for (auto d : kDimensions) {
    auto name = to_string(d);
    if (name.size() == text.size() &&
        std::equal(name.begin(), name.end(), text.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) ==
                 std::tolower(static_cast<unsigned char>(b));
        }))
      return d;
  }
  return std::nullopt;
}

std::array<char, 2> legal_labels(Dimension d) {
  switch (d) {
    case Dimension::How: return {'T', 'D'};
    case Dimension::Repetitiveness: return {'R', 'V'};
    case Dimension::Nature: return {'P', 'M'};
  }
  return {'T', 'D'};
}

bool is_legal(Dimension d, char label) {
  auto l = legal_labels(d);
  return label == l[0] || label == l[1];
}

std::string_view label_name(Dimension d, char label) {
  switch (label) {
    case 'T': return d == Dimension::How ? "Interactive" : "?";
    case 'D': return d == Dimension::How ? "Independent" : "?";
    case 'R': return d == Dimension::Repetitiveness ? "Repetitive" : "?";
    case 'V': return d == Dimension::Repetitiveness ? "Variable" : "?";
    case 'P': return d == Dimension::Nature ? "Physical" : "?";
    case 'M': return d == Dimension::Nature ? "Mental" : "?";
    default: return "?";
  }
}

std::string_view label_field(Dimension d) {
  switch (d) {
    case Dimension::How: return "Label of How (T/D)";
    case Dimension::Repetitiveness: return "Label of Repetitiveness (R/V)";
    case Dimension::Nature: return "Label of Nature (P/M)";
  }
  return "";
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Llm: return "llm";
    case Source::Human: return "human";
    case Source::Author: return "author";
    case Source::Final: return "final";
  }
  return "llm";
}

std::optional<Source> parse_source(std::string_view text) {
  for (auto s : {Source::Llm, Source::Human, Source::Author, Source::Final})
    if (text == to_string(s)) return s;
  return std::nullopt;
}

// ---- prompts and replies -------------------------------------------------

std::string render_prompt(std::string_view task_text, Dimension d) {
  std::string_view tmpl;
  switch (d) {
    case Dimension::How: tmpl = detail::kHowPrompt; break;
    case Dimension::Repetitiveness: tmpl = detail::kRepetitivenessPrompt; break;
    case Dimension::Nature: tmpl = detail::kNaturePrompt; break;
  }
  static constexpr std::string_view kSlot = "{task}";
  auto pos = tmpl.find(kSlot);
  std::string out;
  out.reserve(tmpl.size() + task_text.size());
  out.append(tmpl.substr(0, pos));
  out.append(task_text);
  out.append(tmpl.substr(pos + kSlot.size()));
  return out;
}

std::string build_request(std::string_view model, std::string_view prompt) {
  json req;
  req["model"] = std::string(model);
  req["messages"] = json::array({{{"role", "user"}, {"content", std::string(prompt)}}});
  req["temperature"] = 0;
  return req.dump();
}

std::optional<std::string> extract_content(std::string_view response_body) {
  auto j = json::parse(response_body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message")) return std::nullopt;
  const auto& msg = first["message"];
  if (!msg.is_object() || !msg.contains("content") || !msg["content"].is_string())
    return std::nullopt;
  return msg["content"].get<std::string>();
}

namespace {

// End of the balanced {...} starting at `open`, honouring JSON strings.
std::optional<std::size_t> object_end(std::string_view s, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (escaped)
        escaped = false;
      else if (c == '\\')
        escaped = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"')
      in_string = true;
    else if (c == '{')
      ++depth;
    else if (c == '}' && --depth == 0)
      return i;
  }
  return std::nullopt;
}

std::optional<char> as_label(std::string value, Dimension d) {
  auto first = value.find_first_not_of(" \t\r\n\"'");
  auto last = value.find_last_not_of(" \t\r\n\"'.");
  if (first == std::string::npos) return std::nullopt;
  value = value.substr(first, last - first + 1);
  if (value.size() != 1) return std::nullopt;
  char c = static_cast<char>(std::toupper(static_cast<unsigned char>(value[0])));
  if (!is_legal(d, c)) return std::nullopt;
  return c;
}

}  // namespace

std::optional<char> parse_reply(std::string_view content, Dimension d) {
  const std::string field(label_field(d));

  for (auto open = content.find('{'); open != std::string_view::npos;
       open = content.find('{', open + 1)) {
    auto close = object_end(content, open);
    if (!close) break;
    auto obj = json::parse(content.substr(open, *close - open + 1), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) continue;
    auto it = obj.find(field);
    if (it == obj.end()) continue;
    if (!it->is_string()) return std::nullopt;
    return as_label(it->get<std::string>(), d);
  }

  // "Label of Nature (P/M): P" style replies.
  std::string pattern;
  for (char c : field) {
    if (std::string_view("()[]{}.*+?^$|\\/").find(c) != std::string_view::npos) pattern += '\\';
    pattern += c;
  }
  pattern += R"re("?\s*:\s*"?([A-Za-z]+))re";
  std::smatch m;
  std::string text(content);
  if (std::regex_search(text, m, std::regex(pattern))) return as_label(m[1].str(), d);
  return std::nullopt;
}

// ---- replay --------------------------------------------------------------

namespace {

json maybe_json(const std::string& text) {
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) return text;
  return j;
}

std::string as_text(const json& j) { return j.is_string() ? j.get<std::string>() : j.dump(); }

class ReplayBackend final : public ChatBackend {
public:
  explicit ReplayBackend(std::vector<ReplayRecord> records) {
    for (auto& r : records) {
      auto key = r.key;
      by_key_.insert_or_assign(std::move(key), std::move(r));
    }
  }

  ChatResponse send(const CallKey& key, const std::string&) override {
    auto it = by_key_.find(key);
    if (it == by_key_.end())
      fail(ErrorKind::Network, "no replay entry for task '{}' dimension {} attempt {}",
           key.task_id, to_string(key.dimension), key.attempt);
    if (!it->second.error.empty()) fail(ErrorKind::Network, "{}", it->second.error);
    return {it->second.status, it->second.response};
  }

private:
  std::map<CallKey, ReplayRecord> by_key_;
};

}  // namespace

std::string render_replay(std::span<const ReplayRecord> records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["task_id"] = r.key.task_id;
    j["dimension"] = std::string(to_string(r.key.dimension));
    j["attempt"] = r.key.attempt;
    j["request"] = maybe_json(r.request);
    j["status"] = r.status;
    j["response"] = maybe_json(r.response);
    if (!r.error.empty()) j["error"] = r.error;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ReplayRecord> load_replay(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  std::vector<ReplayRecord> out;
  std::string line;
  std::size_t lineno = 0;
  const std::string source = path.filename().string();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw DataError(source, lineno, "", "not a JSON object");
    try {
      ReplayRecord r;
      r.key.task_id = j.at("task_id").get<std::string>();
      auto dim = parse_dimension(j.at("dimension").get<std::string>());
      if (!dim) throw DataError(source, lineno, "dimension", "unknown dimension");
      r.key.dimension = *dim;
      r.key.attempt = j.value("attempt", 0u);
      r.request = j.contains("request") ? as_text(j["request"]) : "";
      r.status = j.value("status", 200);
      r.response = j.contains("response") ? as_text(j["response"]) : "";
      r.error = j.value("error", "");
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw DataError(source, lineno, "", e.what());
    }
  }
  return out;
}

std::unique_ptr<ChatBackend> make_replay_backend(std::vector<ReplayRecord> records) {
  return std::make_unique<ReplayBackend>(std::move(records));
}

// ---- LLM run -------------------------------------------------------------

LlmRun annotate_llm(std::span<const corpus::TaskRecord> tasks, Dimension d,
                    ChatBackend& backend, const LlmConfig& config) {
  struct PerTask {
    std::optional<char> label;
    std::vector<ReplayRecord> calls;
    Warnings warnings;
  };
  std::vector<PerTask> results(tasks.size());

  parallel_for(tasks.size(), std::max(1u, config.concurrency), [&](std::size_t t) {
    const auto& task = tasks[t];
    auto& res = results[t];
    const std::string request = build_request(config.model, render_prompt(task.description, d));
    for (unsigned attempt = 0; attempt <= config.max_retries; ++attempt) {
      ReplayRecord call{{task.task_id, d, attempt}, request, 0, "", ""};
      try {
        auto reply = backend.send(call.key, request);
        call.status = reply.status;
        call.response = std::move(reply.body);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Network) throw;
        call.error = e.what();
      }
      res.calls.push_back(call);
      if (!call.error.empty()) {
        res.warnings.push_back(fmt::format("task '{}' {} attempt {}: {}", task.task_id,
                                           to_string(d), attempt, call.error));
        continue;
      }
      if (call.status != 200) {
        res.warnings.push_back(fmt::format("task '{}' {} attempt {}: HTTP status {}",
                                           task.task_id, to_string(d), attempt, call.status));
        continue;
      }
      auto content = extract_content(call.response);
      if (content) res.label = parse_reply(*content, d);
      if (res.label) break;
      res.warnings.push_back(fmt::format("task '{}' {} attempt {}: no legal label in reply",
                                         task.task_id, to_string(d), attempt));
    }
  });

  LlmRun run;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& res = results[t];
    if (res.label)
      run.annotations.push_back(
          {tasks[t].task_id, d, *res.label, Source::Llm, config.model});
    else
      run.missing.push_back(tasks[t].task_id);
    std::move(res.calls.begin(), res.calls.end(), std::back_inserter(run.log));
    std::move(res.warnings.begin(), res.warnings.end(), std::back_inserter(run.warnings));
  }
  return run;
}

// ---- annotation files ----------------------------------------------------

AnnotationFile load_annotations(const std::filesystem::path& path, Source source,
                                std::optional<std::size_t> required_count) {
  auto table = csv::Table::read_file(path);
  table.require_header({"task_id", "dimension", "label", "annotator_id"});
  AnnotationFile out;
  std::set<std::tuple<std::string, Dimension, std::string>> seen;
  std::map<ConsensusKey, std::size_t> counts;
  for (const auto& rec : table.records()) {
    const auto& f = rec.fields;
    if (f[0].empty()) throw DataError(table.source(), rec.line, "task_id", "empty task id");
    auto dim = parse_dimension(f[1]);
    if (!dim)
      throw DataError(table.source(), rec.line, "dimension",
                      fmt::format("unknown dimension '{}'", f[1]));
    if (f[2].size() != 1 || !is_legal(*dim, f[2][0]))
      throw DataError(table.source(), rec.line, "label",
                      fmt::format("'{}' is not a legal {} label", f[2], to_string(*dim)));
    if (f[3].empty())
      throw DataError(table.source(), rec.line, "annotator_id", "empty annotator id");
    if (!seen.emplace(f[0], *dim, f[3]).second)
      throw DataError(table.source(), rec.line, "",
                      fmt::format("annotator '{}' labelled task '{}' {} twice", f[3], f[0],
                                  to_string(*dim)));
    ++counts[{f[0], *dim}];
    out.annotations.push_back({f[0], *dim, f[2][0], source, f[3]});
  }
  if (required_count) {
    for (const auto& [key, n] : counts) {
      if (n == *required_count) continue;
      out.excluded.push_back(key);
      out.warnings.push_back(fmt::format("{}: task '{}' {} has {} annotation(s), expected {}; "
                                         "excluded from consensus",
                                         table.source(), key.first, to_string(key.second), n,
                                         *required_count));
    }
  }
  return out;
}

AnnotationFile ingest_survey(const std::filesystem::path& path) {
  return load_annotations(path, Source::Human, 3);
}

std::string render_annotations(std::span<const Annotation> annotations) {
  csv::Writer w{"task_id", "dimension", "label", "annotator_id"};
  for (const auto& a : annotations)
    w.row({a.task_id, to_string(a.dimension), std::string(1, a.label), a.annotator_id});
  return w.str();
}

// ---- aggregation ---------------------------------------------------------

ConsensusLabel majority_vote(std::span<const Annotation> group) {
  if (group.empty()) fail(ErrorKind::Data, "majority vote over an empty group");
  const auto& first = group.front();
  for (const auto& a : group)
    if (a.task_id != first.task_id || a.dimension != first.dimension)
      fail(ErrorKind::Data, "majority vote group mixes task '{}' {} with task '{}' {}",
           first.task_id, to_string(first.dimension), a.task_id, to_string(a.dimension));
  if (group.size() % 2 == 0)
    fail(ErrorKind::Data, "task '{}' {} has an even number of annotators ({})", first.task_id,
         to_string(first.dimension), group.size());

  auto labels = legal_labels(first.dimension);
  std::array<std::size_t, 2> votes{0, 0};
  for (const auto& a : group) {
    if (a.label == labels[0])
      ++votes[0];
    else if (a.label == labels[1])
      ++votes[1];
    else
      fail(ErrorKind::Data, "illegal {} label '{}' for task '{}'", to_string(a.dimension),
           a.label, a.task_id);
  }
  const std::size_t winner = votes[0] > votes[1] ? 0 : 1;
  return {first.task_id, first.dimension, labels[winner], votes[winner], group.size()};
}

ConsensusSet build_consensus(std::span<const Annotation> annotations,
                             std::span<const ConsensusKey> excluded) {
  std::map<ConsensusKey, std::vector<Annotation>> groups;
  for (const auto& a : annotations) groups[{a.task_id, a.dimension}].push_back(a);
  for (const auto& key : excluded) groups.erase(key);
  ConsensusSet out;
  for (const auto& [key, group] : groups) out.emplace(key, majority_vote(group));
  return out;
}

namespace {

std::set<std::string> tasks_for(const ConsensusSet& s, Dimension d) {
  std::set<std::string> out;
  for (const auto& [key, label] : s)
    if (key.second == d) out.insert(key.first);
  return out;
}

}  // namespace

double agreement_rate(const ConsensusSet& a, const ConsensusSet& b, Dimension d) {
  auto ta = tasks_for(a, d);
  auto tb = tasks_for(b, d);
  if (ta != tb) {
    std::vector<std::string> diff;
    std::set_symmetric_difference(ta.begin(), ta.end(), tb.begin(), tb.end(),
                                  std::back_inserter(diff));
    std::string list;
    for (const auto& t : diff) {
      if (!list.empty()) list += ", ";
      list += t;
    }
    fail(ErrorKind::Data, "{} agreement over different task sets; symmetric difference: {}",
         to_string(d), list);
  }
  if (ta.empty()) fail(ErrorKind::Data, "{} agreement over an empty task set", to_string(d));
  std::size_t agree = 0;
  for (const auto& t : ta)
    if (a.at({t, d}).label == b.at({t, d}).label) ++agree;
  return 100.0 * static_cast<double>(agree) / static_cast<double>(ta.size());
}

std::pair<ConsensusSet, ConsensusSet> intersect(const ConsensusSet& a, const ConsensusSet& b) {
  std::pair<ConsensusSet, ConsensusSet> out;
  for (const auto& [key, label] : a) {
    auto it = b.find(key);
    if (it == b.end()) continue;
    out.first.emplace(key, label);
    out.second.emplace(key, it->second);
  }
  return out;
}

Alignment alignment_rate(const ConsensusSet& first, const ConsensusSet& second,
                         const ConsensusSet& adjudicated, Dimension d) {
  Alignment out;
  for (const auto& [key, label] : first) {
    if (key.second != d) continue;
    auto other = second.find(key);
    if (other == second.end() || other->second.label == label.label) continue;
    ++out.disagreements;
    auto adj = adjudicated.find(key);
    if (adj == adjudicated.end()) continue;
    ++out.adjudicated;
    if (adj->second.label == label.label) ++out.aligned_with_first;
  }
  if (out.adjudicated > 0)
    out.rate = 100.0 * static_cast<double>(out.aligned_with_first) /
               static_cast<double>(out.adjudicated);
  return out;
}

ConsensusSet merge_final(const ConsensusSet& base, const ConsensusSet& overrides) {
  ConsensusSet out = base;
  for (const auto& [key, label] : overrides) {
    auto it = out.find(key);
    if (it != out.end()) it->second = label;
  }
  return out;
}

std::string render_consensus(std::span<const std::pair<Source, const ConsensusSet*>> sets) {
  csv::Writer w{"task_id", "dimension", "label", "support", "n_annotators", "source"};
  for (const auto& [source, set] : sets)
    for (const auto& [key, c] : *set)
      w.row({c.task_id, to_string(c.dimension), std::string(1, c.label),
             std::to_string(c.support), std::to_string(c.n_annotators), to_string(source)});
  return w.str();
}

std::map<Source, ConsensusSet> load_consensus(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"task_id", "dimension", "label", "support", "n_annotators", "source"});
  std::map<Source, ConsensusSet> out;
  for (const auto& rec : table.records()) {
    const auto& f = rec.fields;
    auto dim = parse_dimension(f[1]);
    if (!dim) throw DataError(table.source(), rec.line, "dimension", "unknown dimension");
    if (f[2].size() != 1 || !is_legal(*dim, f[2][0]))
      throw DataError(table.source(), rec.line, "label", "illegal label");
    auto src = parse_source(f[5]);
    if (!src) throw DataError(table.source(), rec.line, "source", "unknown source");
    ConsensusLabel c{f[0], *dim, f[2][0], csv::parse_uint(table, rec, 3),
                     csv::parse_uint(table, rec, 4)};
    if (!(2 * c.support > c.n_annotators))
      throw DataError(table.source(), rec.line, "support", "support is not a majority");
    out[*src].emplace(ConsensusKey{c.task_id, c.dimension}, c);
  }
  return out;
}

}  // namespace aix::annotate
