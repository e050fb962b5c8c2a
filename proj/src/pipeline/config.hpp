#pragma once

// Pipeline configuration: an INI file with one section per stage family.
// Relative paths resolve against the config file's directory.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "annotate/annotate.hpp"
#include "disruption/disruption.hpp"

namespace aix::pipeline {

struct Paths {
  std::filesystem::path patents;
  std::filesystem::path citations;
  std::filesystem::path tasks;
  std::filesystem::path occ_industry;
  std::filesystem::path vacancy;
  std::filesystem::path patent_embeddings;
  std::filesystem::path task_embeddings;
  std::filesystem::path survey;        // optional
  std::filesystem::path adjudication;  // optional
  std::filesystem::path replay;        // required when llm.mode = replay
};

enum class LlmMode { Replay, Live };

struct PipelineConfig {
  std::filesystem::path base_dir;
  std::filesystem::path out_dir;
  Paths paths;

  disruption::FilterConfig filter;

  double quartile_low = 25.0;
  double quartile_high = 75.0;
  double impact_percentile = 90.0;
  double edge_percentile = 95.0;
  double sigma_mult = 2.0;

  std::size_t n_iter = 500;
  annotate::Source zscore_source = annotate::Source::Final;

  long long not_impacted_total = 0;  // 0: disruptive + consolidating sample size
  double survey_fraction = 0.05;

  std::uint64_t seed = 42;
  unsigned threads = 1;

  LlmMode llm_mode = LlmMode::Replay;
  annotate::LlmConfig llm;
};

// "section.key" -> value, applied over the file before validation.
using Overrides = std::vector<std::pair<std::string, std::string>>;

// Throws Error(Config) naming the offending field, e.g.
// "thresholds.impact_percentile: must be in (0, 100)".
PipelineConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

}  // namespace aix::pipeline
