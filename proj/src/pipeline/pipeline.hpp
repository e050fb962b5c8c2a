#pragma once

// Pipeline stages. Each stage reads declared inputs, writes its outputs into
// the output directory and records a <stage>.manifest.json with input and
// output hashes, the seed and the version.

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "common/error.hpp"
#include "pipeline/config.hpp"

namespace aix::pipeline {

enum class LogLevel { Info, Warning };

using Logger = std::function<void(LogLevel, const std::string&)>;

struct StageReport {
  std::string stage;
  std::vector<std::string> outputs;  // file names within the output directory
  Warnings warnings;
};

// Stage names in run-all order.
std::span<const std::string_view> stage_names();

// Runs one stage, or every stage for "run-all". Throws Error; a missing
// upstream artifact names the subcommand that produces it.
std::vector<StageReport> run_stage(const PipelineConfig& config, std::string_view stage,
                                   const Logger& logger = {});

const char* version();

}  // namespace aix::pipeline
