#include "disruption/disruption.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "common/csv.hpp"
#include "common/parallel.hpp"
#include "common/percentile.hpp"

namespace aix::disruption {

namespace {

void build_csr(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
               std::vector<std::size_t>& offsets, std::vector<std::uint32_t>& data) {
  offsets.assign(n + 1, 0);
  for (auto [from, to] : pairs) ++offsets[from + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  data.assign(pairs.size(), 0);
  auto cursor = offsets;
  for (auto [from, to] : pairs) data[cursor[from]++] = to;
  for (std::size_t i = 0; i < n; ++i)
    std::sort(data.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
              data.begin() + static_cast<std::ptrdiff_t>(offsets[i + 1]));
}

// Generation-stamped marks so per-focal work is proportional to the
// neighbourhood, not the graph.
struct Scratch {
  std::vector<std::uint32_t> cites_focal;
  std::vector<std::uint32_t> seen;
  std::uint32_t generation = 0;

  explicit Scratch(std::size_t n) : cites_focal(n, 0), seen(n, 0) {}

  void next() {
    if (++generation == 0) {
      std::fill(cites_focal.begin(), cites_focal.end(), 0);
      std::fill(seen.begin(), seen.end(), 0);
      generation = 1;
    }
  }
};

DisruptionCounts count_focal(const CitationGraph& g, std::size_t focal, Scratch& s) {
  s.next();
  const auto gen = s.generation;
  const auto t = g.grant_date(focal);

  std::uint64_t focal_citers = 0;
  for (auto c : g.citers(focal)) {
    if (g.grant_date(c) > t) {
      s.cites_focal[c] = gen;
      ++focal_citers;
    }
  }

  DisruptionCounts out;
  for (auto r : g.references(focal)) {
    for (auto c : g.citers(r)) {
      if (c == focal || !(g.grant_date(c) > t) || s.seen[c] == gen) continue;
      s.seen[c] = gen;
      if (s.cites_focal[c] == gen)
        ++out.n_j;
      else
        ++out.n_k;
    }
  }
  out.n_i = focal_citers - out.n_j;
  return out;
}

}  // namespace

CitationGraph CitationGraph::build(std::span<const corpus::Patent> patents,
                                   std::span<const corpus::CitationEdge> edges) {
  CitationGraph g;
  g.ids_.reserve(patents.size());
  g.dates_.reserve(patents.size());
  for (const auto& p : patents) {
    auto idx = static_cast<std::uint32_t>(g.ids_.size());
    if (!g.index_.emplace(p.patent_id, idx).second)
      fail(ErrorKind::Data, "duplicate patent id '{}' in graph input", p.patent_id);
    g.ids_.push_back(p.patent_id);
    g.dates_.push_back(p.grant_date);
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> fwd, bwd;
  fwd.reserve(edges.size());
  bwd.reserve(edges.size());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> seen;
  seen.reserve(edges.size());
  for (const auto& e : edges) {
    auto citing = g.index_.find(e.citing_id);
    auto cited = g.index_.find(e.cited_id);
    if (citing == g.index_.end() || cited == g.index_.end())
      fail(ErrorKind::Data, "citation {} -> {} references an unknown patent", e.citing_id,
           e.cited_id);
    if (citing->second == cited->second)
      fail(ErrorKind::Data, "self-citation of '{}' in graph input", e.citing_id);
    seen.emplace_back(citing->second, cited->second);
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  for (auto [citing, cited] : seen) {
    fwd.emplace_back(cited, citing);
    bwd.emplace_back(citing, cited);
  }
  build_csr(g.size(), fwd, g.forward_offsets_, g.forward_);
  build_csr(g.size(), bwd, g.backward_offsets_, g.backward_);
  return g;
}

std::optional<std::size_t> CitationGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> disruption_index(const DisruptionCounts& c) {
  const std::uint64_t denom = c.n_i + c.n_j + c.n_k;
  if (denom == 0) return std::nullopt;
  return (static_cast<double>(c.n_i) - static_cast<double>(c.n_j)) / static_cast<double>(denom);
}

DisruptionCounts disruption_counts(const CitationGraph& graph, std::string_view focal) {
  auto idx = graph.find(focal);
  if (!idx) fail(ErrorKind::Data, "unknown focal patent '{}'", focal);
  Scratch scratch(graph.size());
  return count_focal(graph, *idx, scratch);
}

std::vector<DisruptionScore> score_all(const CitationGraph& graph, unsigned threads) {
  std::vector<DisruptionScore> out(graph.size());
  parallel_chunks(graph.size(), threads, [&](std::size_t begin, std::size_t end) {
    Scratch scratch(graph.size());
    for (std::size_t i = begin; i < end; ++i) {
      auto counts = count_focal(graph, i, scratch);
      out[i] = DisruptionScore{graph.id(i), counts, disruption_index(counts)};
    }
  });
  return out;
}

std::vector<std::string> default_ai_keywords() {
  return {"machine learning",
          "deep learning",
          "artificial intelligence",
          "reinforcement learning",
          "neural network",
          "image recognition",
          "computer vision",
          "natural language processing",
          "computational linguistics",
          "speech processing",
          "control methods",
          "knowledge representation",
          "planning",
          "predictive analytics",
          "robot"};
}

FilterConfig default_filter_config() {
  FilterConfig c;
  c.keywords = default_ai_keywords();
  return c;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_space = true;
    }
  }
  return out;
}

bool matches_keywords(const corpus::Patent& patent, std::span<const std::string> keywords) {
  const std::string haystack =
      " " + normalize_text(patent.title) + " " + normalize_text(patent.abstract) + " ";
  for (const auto& kw : keywords) {
    auto needle = normalize_text(kw);
    if (needle.empty()) continue;
    if (haystack.find(" " + needle + " ") != std::string::npos) return true;
  }
  return false;
}

std::vector<std::string> filter_ai_patents(std::span<const corpus::Patent> patents,
                                           const FilterConfig& config,
                                           const CitationGraph& graph) {
  if (config.keywords.empty() && config.cpc_prefixes.empty())
    fail(ErrorKind::Config, "AI filter needs at least one keyword or CPC prefix");
  if (config.year_min > config.year_max)
    fail(ErrorKind::Config, "filter year window [{}, {}] is empty", config.year_min,
         config.year_max);

  std::vector<std::string> out;
  for (const auto& p : patents) {
    const int year = static_cast<int>(p.grant_date.year());
    if (year < config.year_min || year > config.year_max) continue;
    auto node = graph.find(p.patent_id);
    if (!node) fail(ErrorKind::Data, "patent '{}' is not in the citation graph", p.patent_id);
    if (graph.citers(*node).size() < config.min_forward_citations) continue;
    if (graph.references(*node).size() < config.min_references) continue;

    bool cpc_hit = std::any_of(p.cpc_codes.begin(), p.cpc_codes.end(), [&](const auto& code) {
      return std::any_of(config.cpc_prefixes.begin(), config.cpc_prefixes.end(),
                         [&](const auto& prefix) {
                           return !prefix.empty() && code.starts_with(prefix);
                         });
    });
    if (cpc_hit || matches_keywords(p, config.keywords)) out.push_back(p.patent_id);
  }
  return out;
}

std::string_view to_string(PatentClass c) {
  switch (c) {
    case PatentClass::Disruptive: return "disruptive";
    case PatentClass::Consolidating: return "consolidating";
    case PatentClass::Middle: return "middle";
  }
  return "middle";
}

std::optional<PatentClass> parse_patent_class(std::string_view text) {
  if (text == "disruptive") return PatentClass::Disruptive;
  if (text == "consolidating") return PatentClass::Consolidating;
  if (text == "middle") return PatentClass::Middle;
  return std::nullopt;
}

Classification classify_patents(std::span<const DisruptionScore> scores, double low_percent,
                                double high_percent) {
  if (!(low_percent < high_percent))
    fail(ErrorKind::Config, "quartile cut {} must be below {}", low_percent, high_percent);
  Classification out;
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& s : scores) {
    if (s.d)
      values.push_back(*s.d);
    else
      out.undefined.push_back(s.patent_id);
  }
  if (values.size() < 4)
    fail(ErrorKind::Data, "quartile labelling needs at least 4 defined scores, got {}",
         values.size());
  if (!out.undefined.empty())
    out.warnings.push_back(fmt::format("{} patent(s) with an undefined disruption index excluded",
                                       out.undefined.size()));

  out.q_low = nearest_rank_value(values, low_percent);
  out.q_high = nearest_rank_value(values, high_percent);

  std::size_t both = 0;
  for (const auto& s : scores) {
    if (!s.d) continue;
    const bool top = *s.d >= out.q_high;
    const bool bottom = *s.d <= out.q_low;
    PatentClass c = PatentClass::Middle;
    if (top && bottom)
      ++both;
    else if (top)
      c = PatentClass::Disruptive;
    else if (bottom)
      c = PatentClass::Consolidating;
    out.classes[s.patent_id] = c;
  }
  if (both > 0)
    out.warnings.push_back(fmt::format(
        "degenerate score distribution: {} patent(s) sit on both cut-offs ({}) and were "
        "labelled middle",
        both, out.q_low));
  return out;
}

std::string render_scores(std::span<const DisruptionScore> scores,
                          const Classification& classification) {
  csv::Writer w{"patent_id", "n_i", "n_j", "n_k", "d", "class"};
  for (const auto& s : scores) {
    std::string label = "undefined";
    if (auto it = classification.classes.find(s.patent_id); it != classification.classes.end())
      label = std::string(to_string(it->second));
    w.row({s.patent_id, std::to_string(s.counts.n_i), std::to_string(s.counts.n_j),
           std::to_string(s.counts.n_k), csv::format_optional(s.d), label});
  }
  return w.str();
}

std::vector<ScoreRow> load_scores(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"patent_id", "n_i", "n_j", "n_k", "d", "class"});
  std::vector<ScoreRow> out;
  out.reserve(table.size());
  for (const auto& rec : table.records()) {
    ScoreRow row;
    row.score.patent_id = rec.fields[0];
    row.score.counts = {csv::parse_uint(table, rec, 1), csv::parse_uint(table, rec, 2),
                        csv::parse_uint(table, rec, 3)};
    row.score.d = csv::parse_optional_double(table, rec, 4);
    row.label = rec.fields[5];
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace aix::disruption
