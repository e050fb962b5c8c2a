// Command-line front end over the C API.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aix/aix.h"

namespace {

int exit_code(aix_status s) {
  switch (s) {
    case AIX_OK: return 0;
    case AIX_E_USAGE:
    case AIX_E_CONFIG: return 1;
    default: return 2;
  }
}

void log_line(void*, aix_log_level level, const char* message) {
  std::fprintf(stderr, "%s%s\n", level == AIX_LOG_WARNING ? "warning: " : "", message);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disruptive and consolidating AI exposure of job tasks"};
  app.set_version_flag("--version", aix_version());
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<long long> n_iter;
  std::string out;
  std::vector<std::string> sets;
  bool quiet = false;
  app.add_option("--config", config, "Pipeline config file")->required();
  app.add_option("--seed", seed, "Pipeline seed (overrides run.seed)");
  app.add_option("--threads", threads, "Thread limit (overrides run.threads)");
  app.add_option("--out", out, "Output directory (overrides run.out)");
  app.add_option("--n-iter", n_iter, "Null-model shuffles (overrides zscores.n_iter)");
  app.add_option("--set", sets, "Config override, section.key=value")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_flag("-q,--quiet", quiet, "Only print warnings and errors");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"score", "Disruption index of every patent"},
      {"filter", "Select AI patents and label them by quartile"},
      {"match", "Best AI patent for every task"},
      {"classify", "Label tasks by the impact threshold"},
      {"network", "Task similarity networks and communities"},
      {"sample", "Representative tasks for annotation"},
      {"annotate", "LLM labels for the annotation set"},
      {"consensus", "Majority votes and agreement rates"},
      {"zscores", "Shuffle null-model z-scores"},
      {"aggregate", "Industry, state and exposure tables"},
      {"correlate", "Exposure against vacancy rates"},
      {"run-all", "Every stage in order"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string stage = app.get_subcommands().front()->get_name();

  aix_pipeline* p = nullptr;
  aix_status s = aix_pipeline_open(config.c_str(), &p);
  auto check = [&](aix_status st) {
    if (st == AIX_OK) return true;
    std::fprintf(stderr, "aix %s: %s: %s\n", stage.c_str(), aix_status_name(st), aix_last_error());
    s = st;
    return false;
  };
  if (!check(s)) return exit_code(s);

  bool ok = true;
  if (seed) ok = ok && check(aix_pipeline_set_seed(p, *seed));
  if (threads) ok = ok && check(aix_pipeline_set_threads(p, *threads));
  if (!out.empty()) ok = ok && check(aix_pipeline_set_out_dir(p, out.c_str()));
  if (n_iter) ok = ok && check(aix_pipeline_set_option(p, "zscores.n_iter", std::to_string(*n_iter).c_str()));
  for (const auto& kv : sets) {
    if (!ok) break;
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "aix: --set expects section.key=value, got '%s'\n", kv.c_str());
      aix_pipeline_close(p);
      return 1;
    }
    ok = check(aix_pipeline_set_option(p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  if (ok) {
    aix_pipeline_set_logger(p, quiet ? [](void*, aix_log_level level, const char* m) {
      if (level == AIX_LOG_WARNING) log_line(nullptr, level, m);
    } : log_line, nullptr);
    ok = check(aix_pipeline_run_stage(p, stage.c_str()));
  }
  aix_pipeline_close(p);
  return ok ? 0 : exit_code(s);
}
