#pragma once

// Industry proportion deltas, state patent-share deltas weighted by matched
// tasks, and sectoral exposure ratios.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "corpus/corpus.hpp"
#include "embedding/embedding.hpp"
#include "stats/stats.hpp"

namespace aix::aggregate {

using embedding::TaskImpact;

// One labelled task with everything the aggregates need.
struct TaskView {
  std::string task_id;
  TaskImpact label = TaskImpact::NotImpacted;
  std::string sector;
  std::string patent_id;              // best match
  std::optional<std::string> state;  // of the matched patent
};

// Joins labels with the task file, the industry map, the matches and the
// patents. Output is in task id order.
std::vector<TaskView> join_tasks(const std::map<std::string, TaskImpact>& labels,
                                 std::span<const corpus::TaskRecord> tasks,
                                 const corpus::IndustryMap& industry_map,
                                 std::span<const embedding::MatchResult> matches,
                                 std::span<const corpus::Patent> patents);

struct IndustryRow {
  std::string sector;
  std::size_t t_d = 0, t_c = 0, t_all = 0;  // impacted task counts
  double p_d = 0.0, p_c = 0.0, p_all = 0.0;
  double delta_d = 0.0, delta_c = 0.0;  // P_D - P, P_C - P
};

struct IndustryAggregate {
  std::vector<IndustryRow> rows;  // every declared sector, by name
  std::size_t t_d = 0, t_c = 0, t_all = 0;
};

// "All AI" is every impacted task, middle-class matches included.
IndustryAggregate industry_deltas(std::span<const TaskView> tasks,
                                  const corpus::IndustryMap& industry_map);

struct StateRow {
  std::string state;
  std::size_t w_d = 0, w_c = 0, w_all = 0;  // task-weighted patent counts
  double p_d = 0.0, p_c = 0.0, p_all = 0.0;
  double delta = 0.0;          // P_D - P_C
  double delta_d_general = 0.0;  // P_D - P_all
  double delta_c_general = 0.0;  // P_C - P_all
};

struct StateAggregate {
  std::vector<StateRow> rows;  // known states, by code
  std::size_t unknown_d = 0, unknown_c = 0, unknown_all = 0;
  std::size_t total_d = 0, total_c = 0, total_all = 0;  // known states only
};

// Every impacted task adds weight 1 to its matched patent's state, so a patent
// matched by three tasks counts three times.
StateAggregate state_deltas(std::span<const TaskView> tasks);

// state_deltas over the tasks of one sector.
StateAggregate state_deltas_by_sector(std::span<const TaskView> tasks, const std::string& sector);

struct ExposureRow {
  std::string sector;
  std::size_t t = 0, t_d = 0, t_c = 0;
  double ratio_d = 0.0, ratio_c = 0.0;
};

struct SectorExposure {
  std::vector<ExposureRow> rows;
  Warnings warnings;
};

// Sectors without tasks are omitted with a warning.
SectorExposure sector_exposure(std::span<const TaskView> tasks,
                               const corpus::IndustryMap& industry_map);

struct SectorTest {
  std::string sector;
  TaskImpact group = TaskImpact::Disruptive;
  stats::TwoPropResult test;
};

// Per sector and class: T_X^I of T_X against T^I of T.
std::vector<SectorTest> sector_two_prop(const IndustryAggregate& industry);

std::string render_industry(const IndustryAggregate& agg);
std::string render_states(const StateAggregate& agg);
std::string render_exposure(const SectorExposure& exposure);
std::string render_two_prop(std::span<const SectorTest> tests);

}  // namespace aix::aggregate
