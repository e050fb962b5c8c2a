#include "aggregate/aggregate.hpp"

#include <unordered_map>

#include "common/csv.hpp"

namespace aix::aggregate {

namespace {

double share(std::size_t part, std::size_t whole) {
  return static_cast<double>(part) / static_cast<double>(whole);
}

std::string count(std::size_t n) { return std::to_string(n); }

}  // namespace

std::vector<TaskView> join_tasks(const std::map<std::string, TaskImpact>& labels,
                                 std::span<const corpus::TaskRecord> tasks,
                                 const corpus::IndustryMap& industry_map,
                                 std::span<const embedding::MatchResult> matches,
                                 std::span<const corpus::Patent> patents) {
  std::unordered_map<std::string, const corpus::TaskRecord*> task_by_id;
  for (const auto& t : tasks) task_by_id.emplace(t.task_id, &t);
  std::unordered_map<std::string, const embedding::MatchResult*> match_by_task;
  for (const auto& m : matches) match_by_task.emplace(m.task_id, &m);
  std::unordered_map<std::string, const corpus::Patent*> patent_by_id;
  for (const auto& p : patents) patent_by_id.emplace(p.patent_id, &p);

  std::vector<TaskView> out;
  out.reserve(labels.size());
  for (const auto& [task_id, label] : labels) {
    auto t = task_by_id.find(task_id);
    if (t == task_by_id.end()) fail(ErrorKind::Data, "labelled task '{}' is not in the task file", task_id);
    TaskView v{task_id, label, industry_map.sector(t->second->occupation_code), "", std::nullopt};
    auto m = match_by_task.find(task_id);
    if (m != match_by_task.end()) v.patent_id = m->second->best_patent_id;
    if (embedding::is_impacted(label)) {
      if (v.patent_id.empty()) fail(ErrorKind::Data, "impacted task '{}' has no match", task_id);
      auto p = patent_by_id.find(v.patent_id);
      if (p == patent_by_id.end())
        fail(ErrorKind::Data, "task '{}' is matched to unknown patent '{}'", task_id, v.patent_id);
      v.state = p->second->assignee_state;
    }
    out.push_back(std::move(v));
  }
  return out;
}

IndustryAggregate industry_deltas(std::span<const TaskView> tasks,
                                  const corpus::IndustryMap& industry_map) {
  std::map<std::string, IndustryRow> rows;
  for (const auto& s : industry_map.sectors) rows[s].sector = s;
  IndustryAggregate agg;
  for (const auto& t : tasks) {
    if (!embedding::is_impacted(t.label)) continue;
    auto it = rows.find(t.sector);
    if (it == rows.end()) fail(ErrorKind::Data, "task '{}' has undeclared sector '{}'", t.task_id, t.sector);
    auto& row = it->second;
    ++row.t_all;
    ++agg.t_all;
    if (t.label == TaskImpact::Disruptive) {
      ++row.t_d;
      ++agg.t_d;
    } else if (t.label == TaskImpact::Consolidating) {
      ++row.t_c;
      ++agg.t_c;
    }
  }
  if (agg.t_all == 0) fail(ErrorKind::Data, "no task is impacted by AI");
  if (agg.t_d == 0) fail(ErrorKind::Data, "no task is impacted by disruptive AI");
  if (agg.t_c == 0) fail(ErrorKind::Data, "no task is impacted by consolidating AI");
  for (auto& [name, row] : rows) {
    row.p_d = share(row.t_d, agg.t_d);
    row.p_c = share(row.t_c, agg.t_c);
    row.p_all = share(row.t_all, agg.t_all);
    row.delta_d = row.p_d - row.p_all;
    row.delta_c = row.p_c - row.p_all;
    agg.rows.push_back(row);
  }
  return agg;
}

StateAggregate state_deltas(std::span<const TaskView> tasks) {
  std::map<std::string, StateRow> rows;
  StateAggregate agg;
  for (const auto& t : tasks) {
    if (!embedding::is_impacted(t.label)) continue;
    const bool d = t.label == TaskImpact::Disruptive;
    const bool c = t.label == TaskImpact::Consolidating;
    if (!t.state) {
      agg.unknown_all += 1;
      agg.unknown_d += d;
      agg.unknown_c += c;
      continue;
    }
    auto& row = rows[*t.state];
    row.state = *t.state;
    row.w_all += 1;
    row.w_d += d;
    row.w_c += c;
    agg.total_all += 1;
    agg.total_d += d;
    agg.total_c += c;
  }
  if (agg.total_d == 0)
    fail(ErrorKind::Data, "no disruptive-impacted task matches a patent with a known state");
  if (agg.total_c == 0)
    fail(ErrorKind::Data, "no consolidating-impacted task matches a patent with a known state");
  for (auto& [code, row] : rows) {
    row.p_d = share(row.w_d, agg.total_d);
    row.p_c = share(row.w_c, agg.total_c);
    row.p_all = share(row.w_all, agg.total_all);
    row.delta = row.p_d - row.p_c;
    row.delta_d_general = row.p_d - row.p_all;
    row.delta_c_general = row.p_c - row.p_all;
    agg.rows.push_back(row);
  }
  return agg;
}

StateAggregate state_deltas_by_sector(std::span<const TaskView> tasks, const std::string& sector) {
  std::vector<TaskView> subset;
  for (const auto& t : tasks)
    if (t.sector == sector) subset.push_back(t);
  if (subset.empty()) fail(ErrorKind::Data, "sector '{}' has no tasks", sector);
  return state_deltas(subset);
}

SectorExposure sector_exposure(std::span<const TaskView> tasks,
                               const corpus::IndustryMap& industry_map) {
  std::map<std::string, ExposureRow> rows;
  for (const auto& s : industry_map.sectors) rows[s].sector = s;
  for (const auto& t : tasks) {
    auto it = rows.find(t.sector);
    if (it == rows.end()) fail(ErrorKind::Data, "task '{}' has undeclared sector '{}'", t.task_id, t.sector);
    auto& row = it->second;
    ++row.t;
    row.t_d += t.label == TaskImpact::Disruptive;
    row.t_c += t.label == TaskImpact::Consolidating;
  }
  SectorExposure out;
  for (auto& [name, row] : rows) {
    if (row.t == 0) {
      out.warnings.push_back(fmt::format("sector '{}' has no tasks; omitted from exposure", name));
      continue;
    }
    row.ratio_d = share(row.t_d, row.t);
    row.ratio_c = share(row.t_c, row.t);
    out.rows.push_back(row);
  }
  return out;
}

std::vector<SectorTest> sector_two_prop(const IndustryAggregate& industry) {
  std::vector<SectorTest> out;
  for (const auto& row : industry.rows) {
    out.push_back({row.sector, TaskImpact::Disruptive,
                   stats::two_prop_test(row.t_d, industry.t_d, row.t_all, industry.t_all)});
    out.push_back({row.sector, TaskImpact::Consolidating,
                   stats::two_prop_test(row.t_c, industry.t_c, row.t_all, industry.t_all)});
  }
  return out;
}

std::string render_industry(const IndustryAggregate& agg) {
  using csv::format_double;
  csv::Writer w{"sector", "t_disruptive", "t_consolidating", "t_all", "p_disruptive",
                "p_consolidating", "p_all", "delta_disruptive", "delta_consolidating"};
  for (const auto& r : agg.rows)
    w.row({r.sector, count(r.t_d), count(r.t_c), count(r.t_all), format_double(r.p_d),
           format_double(r.p_c), format_double(r.p_all), format_double(r.delta_d),
           format_double(r.delta_c)});
  return w.str();
}

std::string render_states(const StateAggregate& agg) {
  using csv::format_double;
  csv::Writer w{"state", "w_disruptive", "w_consolidating", "w_all", "p_disruptive",
                "p_consolidating", "p_all", "delta", "delta_disruptive_general",
                "delta_consolidating_general"};
  for (const auto& r : agg.rows)
    w.row({r.state, count(r.w_d), count(r.w_c), count(r.w_all), format_double(r.p_d),
           format_double(r.p_c), format_double(r.p_all), format_double(r.delta),
           format_double(r.delta_d_general), format_double(r.delta_c_general)});
  if (agg.unknown_all > 0)
    w.row({"unknown", count(agg.unknown_d), count(agg.unknown_c), count(agg.unknown_all), "", "",
           "", "", "", ""});
  return w.str();
}

std::string render_exposure(const SectorExposure& exposure) {
  using csv::format_double;
  csv::Writer w{"sector", "t", "t_disruptive", "t_consolidating", "ratio_disruptive",
                "ratio_consolidating"};
  for (const auto& r : exposure.rows)
    w.row({r.sector, count(r.t), count(r.t_d), count(r.t_c), format_double(r.ratio_d),
           format_double(r.ratio_c)});
  return w.str();
}

std::string render_two_prop(std::span<const SectorTest> tests) {
  using csv::format_double;
  csv::Writer w{"sector", "group", "k1", "n1", "k2", "n2", "p1", "p2", "z", "p_value"};
  for (const auto& t : tests)
    w.row({t.sector, embedding::to_string(t.group), count(t.test.k1), count(t.test.n1),
           count(t.test.k2), count(t.test.n2), format_double(t.test.p1), format_double(t.test.p2),
           csv::format_optional(t.test.z), csv::format_optional(t.test.p_value)});
  return w.str();
}

}  // namespace aix::aggregate
