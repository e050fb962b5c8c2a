#include "pipeline/config.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "common/io.hpp"
#include "common/error.hpp"

namespace aix::pipeline {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"paths",
       {"patents", "citations", "tasks", "occ_industry", "vacancy", "patent_embeddings",
        "task_embeddings", "survey", "adjudication", "replay"}},
      {"filter",
       {"year_min", "year_max", "min_forward_citations", "min_references", "keywords",
        "cpc_prefixes"}},
      {"thresholds",
       {"quartile_low", "quartile_high", "impact_percentile", "edge_percentile", "sigma_mult"}},
      {"zscores", {"n_iter", "source"}},
      {"sample", {"not_impacted_total", "survey_fraction"}},
      {"run", {"seed", "threads", "out"}},
      {"llm",
       {"mode", "base_url", "model", "api_key_env", "max_retries", "timeout_seconds",
        "concurrency"}},
  };
  return keys;
}

class Reader {
public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& field) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(field, '.'));
    if (!v) return std::nullopt;
    auto s = *v;
    auto first = s.find_first_not_of(" \t");
    auto last = s.find_last_not_of(" \t");
    if (first == std::string::npos) return std::string{};
    return s.substr(first, last - first + 1);
  }

  std::string text(const std::string& field, std::string fallback) const {
    auto v = raw(field);
    return v ? *v : fallback;
  }

  template <class T>
  T number(const std::string& field, T fallback) const {
    auto v = raw(field);
    if (!v) return fallback;
    T out{};
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size() || v->empty())
      fail(ErrorKind::Config, "{}: '{}' is not a valid number", field, *v);
    return out;
  }

  std::optional<std::vector<std::string>> list(const std::string& field) const {
    auto v = raw(field);
    if (!v) return std::nullopt;
    std::vector<std::string> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ';')) {
      auto first = item.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      out.push_back(item.substr(first, item.find_last_not_of(" \t") - first + 1));
    }
    return out;
  }

private:
  const pt::ptree& tree_;
};

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) fail(ErrorKind::Config, "{}: {}", field, message);
}

void check_percent(double value, const std::string& field) {
  require(value > 0.0 && value < 100.0, field, "must be in (0, 100)");
}

}  // namespace

PipelineConfig load_config(const fs::path& path, const Overrides& overrides) {
  if (!fs::exists(path)) fail(ErrorKind::Config, "config file {} does not exist", path.string());
  pt::ptree tree;
  try {
    std::istringstream in(io::read_file(path));
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, "{}:{}: {}", path.string(), e.line(), e.message());
  }
  for (const auto& [key, value] : overrides) {
    auto dot = key.find('.');
    require(dot != std::string::npos && dot > 0 && dot + 1 < key.size(), key,
            "override keys take the form section.key");
    tree.put(pt::ptree::path_type(key, '.'), value);
  }
  for (const auto& [section, body] : tree) {
    auto sec = known_keys().find(section);
    require(sec != known_keys().end(), section, "unknown section");
    require(body.data().empty() || !body.empty(), section, "expected a section");
    for (const auto& [key, value] : body)
      require(sec->second.count(key) > 0, section + "." + key, "unknown key");
  }

  Reader r(tree);
  PipelineConfig cfg;
  cfg.base_dir = fs::absolute(path).parent_path();
  auto resolve = [&](const std::string& field, bool required) -> fs::path {
    auto v = r.raw(field);
    if (!v || v->empty()) {
      require(!required, field, "is required");
      return {};
    }
    fs::path p = cfg.base_dir / *v;
    require(fs::exists(p), field, fmt::format("{} does not exist", p.lexically_normal().string()));
    return p.lexically_normal();
  };

  auto mode = r.text("llm.mode", "replay");
  require(mode == "replay" || mode == "live", "llm.mode", "must be 'replay' or 'live'");
  cfg.llm_mode = mode == "replay" ? LlmMode::Replay : LlmMode::Live;

  cfg.paths.patents = resolve("paths.patents", true);
  cfg.paths.citations = resolve("paths.citations", true);
  cfg.paths.tasks = resolve("paths.tasks", true);
  cfg.paths.occ_industry = resolve("paths.occ_industry", true);
  cfg.paths.vacancy = resolve("paths.vacancy", true);
  cfg.paths.patent_embeddings = resolve("paths.patent_embeddings", true);
  cfg.paths.task_embeddings = resolve("paths.task_embeddings", true);
  cfg.paths.survey = resolve("paths.survey", false);
  cfg.paths.adjudication = resolve("paths.adjudication", false);
  cfg.paths.replay = resolve("paths.replay", cfg.llm_mode == LlmMode::Replay);

  auto& f = cfg.filter;
  f = disruption::default_filter_config();
  f.year_min = r.number("filter.year_min", f.year_min);
  f.year_max = r.number("filter.year_max", f.year_max);
  f.min_forward_citations = r.number("filter.min_forward_citations", f.min_forward_citations);
  f.min_references = r.number("filter.min_references", f.min_references);
  if (auto k = r.list("filter.keywords")) f.keywords = *k;
  if (auto c = r.list("filter.cpc_prefixes")) f.cpc_prefixes = *c;
  require(f.year_min <= f.year_max, "filter.year_min", "must not exceed filter.year_max");
  require(!f.keywords.empty() || !f.cpc_prefixes.empty(), "filter.keywords",
          "keywords and cpc_prefixes are both empty");

  cfg.quartile_low = r.number("thresholds.quartile_low", cfg.quartile_low);
  cfg.quartile_high = r.number("thresholds.quartile_high", cfg.quartile_high);
  cfg.impact_percentile = r.number("thresholds.impact_percentile", cfg.impact_percentile);
  cfg.edge_percentile = r.number("thresholds.edge_percentile", cfg.edge_percentile);
  cfg.sigma_mult = r.number("thresholds.sigma_mult", cfg.sigma_mult);
  check_percent(cfg.quartile_low, "thresholds.quartile_low");
  check_percent(cfg.quartile_high, "thresholds.quartile_high");
  check_percent(cfg.impact_percentile, "thresholds.impact_percentile");
  check_percent(cfg.edge_percentile, "thresholds.edge_percentile");
  require(cfg.quartile_low < cfg.quartile_high, "thresholds.quartile_low",
          "must be below thresholds.quartile_high");
  require(cfg.sigma_mult > 0.0, "thresholds.sigma_mult", "must be positive");

  auto n_iter = r.number<long long>("zscores.n_iter", static_cast<long long>(cfg.n_iter));
  require(n_iter >= 2, "zscores.n_iter", "must be at least 2");
  cfg.n_iter = static_cast<std::size_t>(n_iter);
  auto source = annotate::parse_source(r.text("zscores.source", "final"));
  require(source.has_value(), "zscores.source", "must be llm, human, author or final");
  cfg.zscore_source = *source;

  cfg.not_impacted_total = r.number("sample.not_impacted_total", cfg.not_impacted_total);
  require(cfg.not_impacted_total >= 0, "sample.not_impacted_total", "must not be negative");
  cfg.survey_fraction = r.number("sample.survey_fraction", cfg.survey_fraction);
  require(cfg.survey_fraction > 0.0 && cfg.survey_fraction <= 1.0, "sample.survey_fraction",
          "must be in (0, 1]");

  cfg.seed = r.number<std::uint64_t>("run.seed", cfg.seed);
  auto threads = r.number<long long>("run.threads", 1);
  require(threads >= 1 && threads <= 1024, "run.threads", "must be in [1, 1024]");
  cfg.threads = static_cast<unsigned>(threads);
  auto out = r.text("run.out", "out");
  require(!out.empty(), "run.out", "must not be empty");
  cfg.out_dir = (cfg.base_dir / out).lexically_normal();

  auto& llm = cfg.llm;
  llm.base_url = r.text("llm.base_url", "https://api.openai.com/v1");
  llm.model = r.text("llm.model", llm.model);
  llm.api_key_env = r.text("llm.api_key_env", llm.api_key_env);
  llm.max_retries = r.number("llm.max_retries", llm.max_retries);
  llm.timeout_seconds = r.number("llm.timeout_seconds", llm.timeout_seconds);
  llm.concurrency = r.number("llm.concurrency", llm.concurrency);
  require(!llm.model.empty(), "llm.model", "must not be empty");
  require(!llm.api_key_env.empty(), "llm.api_key_env", "must name an environment variable");
  require(llm.timeout_seconds > 0, "llm.timeout_seconds", "must be positive");
  require(llm.concurrency >= 1, "llm.concurrency", "must be at least 1");
  return cfg;
}

}  // namespace aix::pipeline
