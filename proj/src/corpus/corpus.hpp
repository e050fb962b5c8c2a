#pragma once

// Canonical in-memory model of the pipeline inputs, plus CSV loaders and
// writers for each of them.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "common/error.hpp"

namespace aix::corpus {

using Date = std::chrono::year_month_day;

// Strict YYYY-MM-DD within [1790-01-01, 2100-01-01].
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

struct Patent {
  std::string patent_id;
  Date grant_date;
  std::string title;
  std::string abstract;
  std::optional<std::string> assignee_state;
  std::vector<std::string> cpc_codes;

  bool operator==(const Patent&) const = default;
};

struct CitationEdge {
  std::string citing_id;
  std::string cited_id;

  auto operator<=>(const CitationEdge&) const = default;
};

struct CitationLoad {
  std::vector<CitationEdge> edges;  // file order, duplicates removed
  std::size_t dropped_unknown = 0;
  std::size_t dropped_self = 0;
  std::size_t duplicates = 0;
  Warnings warnings;
};

struct TaskRecord {
  std::string task_id;
  std::string description;
  std::string occupation_code;

  bool operator==(const TaskRecord&) const = default;
};

struct IndustryMap {
  std::map<std::string, std::string, std::less<>> sector_of;  // occupation -> sector
  std::set<std::string, std::less<>> sectors;

  // Throws DataError for an unmapped occupation.
  const std::string& sector(std::string_view occupation_code) const;

  bool operator==(const IndustryMap&) const = default;
};

struct VacancyTable {
  std::map<std::string, double, std::less<>> rate;  // sector -> percent

  bool operator==(const VacancyTable&) const = default;
};

std::vector<Patent> load_patents(const std::filesystem::path& path);
CitationLoad load_citations(const std::filesystem::path& path,
                            const std::unordered_set<std::string>& known_ids);
std::vector<TaskRecord> load_tasks(const std::filesystem::path& path);
IndustryMap load_industry_map(const std::filesystem::path& path);
VacancyTable load_vacancies(const std::filesystem::path& path);

// Every task's occupation must be mapped; the error lists all missing codes.
void check_industry_coverage(std::span<const TaskRecord> tasks, const IndustryMap& map);

std::string render_patents(std::span<const Patent> patents);
std::string render_citations(std::span<const CitationEdge> edges);
std::string render_tasks(std::span<const TaskRecord> tasks);
std::string render_industry_map(const IndustryMap& map);
std::string render_vacancies(const VacancyTable& table);

}  // namespace aix::corpus
