#include "corpus/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include <fmt/format.h>

#include "common/csv.hpp"

namespace aix::corpus {

namespace {

bool parse_fixed_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string> split_cpc(const csv::Table& table, const csv::Record& rec,
                                   std::size_t col) {
  std::vector<std::string> codes;
  const std::string& field = rec.fields[col];
  if (field.empty()) return codes;
  std::size_t start = 0;
  while (true) {
    auto pos = field.find(';', start);
    std::string code = field.substr(start, pos == std::string::npos ? pos : pos - start);
    if (code.empty())
      throw DataError(table.source(), rec.line, "cpc_codes", "empty CPC code in list");
    if (std::find(codes.begin(), codes.end(), code) == codes.end())
      codes.push_back(std::move(code));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return codes;
}

bool valid_state(std::string_view s) {
  return s.size() == 2 && std::isalpha(static_cast<unsigned char>(s[0])) &&
         std::isalpha(static_cast<unsigned char>(s[1]));
}

// Reports the first line a key was seen on when it repeats.
class UniqueKeys {
public:
  UniqueKeys(const csv::Table& table, std::string column)
      : table_(table), column_(std::move(column)) {}

  void insert(const std::string& key, std::size_t line) {
    auto [it, inserted] = first_line_.emplace(key, line);
    if (!inserted)
      throw DataError(table_.source(), line, column_,
                      fmt::format("duplicate {} '{}' (first seen on line {})", column_, key,
                                  it->second));
  }

private:
  const csv::Table& table_;
  std::string column_;
  std::unordered_map<std::string, std::size_t> first_line_;
};

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_fixed_int(text.substr(0, 4), y) || !parse_fixed_int(text.substr(5, 2), m) ||
      !parse_fixed_int(text.substr(8, 2), d))
    return std::nullopt;
  Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
            std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) return std::nullopt;
  using namespace std::chrono;
  if (date < year_month_day{year{1790}, January, day{1}} ||
      date > year_month_day{year{2100}, January, day{1}})
    return std::nullopt;
  return date;
}

std::string format_date(Date date) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                     static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

const std::string& IndustryMap::sector(std::string_view occupation_code) const {
  auto it = sector_of.find(occupation_code);
  if (it == sector_of.end())
    throw DataError("industry map", 0, "occupation_code",
                    fmt::format("occupation '{}' has no industry sector", occupation_code));
  return it->second;
}

std::vector<Patent> load_patents(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header(
      {"patent_id", "grant_date", "title", "abstract", "assignee_state", "cpc_codes"});
  std::vector<Patent> out;
  out.reserve(table.size());
  UniqueKeys ids(table, "patent_id");
  for (const auto& rec : table.records()) {
    const auto& f = rec.fields;
    if (f[0].empty()) throw DataError(table.source(), rec.line, "patent_id", "empty patent id");
    auto date = parse_date(f[1]);
    if (!date)
      throw DataError(table.source(), rec.line, "grant_date",
                      fmt::format("invalid date '{}'", f[1]));
    std::optional<std::string> state;
    if (!f[4].empty()) {
      if (!valid_state(f[4]))
        throw DataError(table.source(), rec.line, "assignee_state",
                        fmt::format("'{}' is not a 2-letter region code", f[4]));
      state = f[4];
    }
    ids.insert(f[0], rec.line);
    out.push_back(Patent{f[0], *date, f[2], f[3], std::move(state), split_cpc(table, rec, 5)});
  }
  return out;
}

CitationLoad load_citations(const std::filesystem::path& path,
                            const std::unordered_set<std::string>& known_ids) {
  auto table = csv::Table::read_file(path);
  table.require_header({"citing_id", "cited_id"});
  CitationLoad out;
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const auto& rec : table.records()) {
    const auto& citing = rec.fields[0];
    const auto& cited = rec.fields[1];
    if (citing.empty() || cited.empty())
      throw DataError(table.source(), rec.line, citing.empty() ? "citing_id" : "cited_id",
                      "empty patent id");
    if (citing == cited) {
      ++out.dropped_self;
      out.warnings.push_back(fmt::format("{}:{}: self-citation of '{}' dropped",
                                         table.source(), rec.line, citing));
      continue;
    }
    if (!known_ids.contains(citing) || !known_ids.contains(cited)) {
      ++out.dropped_unknown;
      continue;
    }
    if (!seen.emplace(citing, cited).second) {
      ++out.duplicates;
      continue;
    }
    out.edges.push_back(CitationEdge{citing, cited});
  }
  if (out.dropped_unknown > 0)
    out.warnings.push_back(fmt::format("{}: {} citation(s) with an unknown endpoint dropped",
                                       table.source(), out.dropped_unknown));
  return out;
}

std::vector<TaskRecord> load_tasks(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"task_id", "description", "occupation_code"});
  std::vector<TaskRecord> out;
  out.reserve(table.size());
  UniqueKeys ids(table, "task_id");
  for (const auto& rec : table.records()) {
    const auto& f = rec.fields;
    if (f[0].empty()) throw DataError(table.source(), rec.line, "task_id", "empty task id");
    if (f[1].empty())
      throw DataError(table.source(), rec.line, "description", "empty task description");
    if (f[2].empty())
      throw DataError(table.source(), rec.line, "occupation_code", "empty occupation code");
    ids.insert(f[0], rec.line);
    out.push_back(TaskRecord{f[0], f[1], f[2]});
  }
  return out;
}

IndustryMap load_industry_map(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"occupation_code", "industry_sector"});
  IndustryMap out;
  UniqueKeys ids(table, "occupation_code");
  for (const auto& rec : table.records()) {
    const auto& f = rec.fields;
    if (f[0].empty())
      throw DataError(table.source(), rec.line, "occupation_code", "empty occupation code");
    if (f[1].empty())
      throw DataError(table.source(), rec.line, "industry_sector", "empty sector name");
    ids.insert(f[0], rec.line);
    out.sector_of.emplace(f[0], f[1]);
    out.sectors.insert(f[1]);
  }
  return out;
}

VacancyTable load_vacancies(const std::filesystem::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"industry_sector", "vacancy_rate"});
  VacancyTable out;
  UniqueKeys ids(table, "industry_sector");
  for (const auto& rec : table.records()) {
    if (rec.fields[0].empty())
      throw DataError(table.source(), rec.line, "industry_sector", "empty sector name");
    double rate = csv::parse_double(table, rec, 1);
    if (rate < 0.0 || rate > 100.0)
      throw DataError(table.source(), rec.line, "vacancy_rate",
                      fmt::format("rate {} outside [0, 100]", rate));
    ids.insert(rec.fields[0], rec.line);
    out.rate.emplace(rec.fields[0], rate);
  }
  return out;
}

void check_industry_coverage(std::span<const TaskRecord> tasks, const IndustryMap& map) {
  std::set<std::string> missing;
  for (const auto& t : tasks)
    if (!map.sector_of.contains(t.occupation_code)) missing.insert(t.occupation_code);
  if (missing.empty()) return;
  std::string list;
  for (const auto& m : missing) {
    if (!list.empty()) list += ", ";
    list += m;
  }
  throw DataError("tasks", 0, "occupation_code",
                  fmt::format("{} occupation code(s) missing from the industry map: {}",
                              missing.size(), list));
}

std::string render_patents(std::span<const Patent> patents) {
  csv::Writer w{"patent_id", "grant_date", "title", "abstract", "assignee_state", "cpc_codes"};
  for (const auto& p : patents) {
    std::string cpc;
    for (const auto& c : p.cpc_codes) {
      if (!cpc.empty()) cpc += ';';
      cpc += c;
    }
    w.row({p.patent_id, format_date(p.grant_date), p.title, p.abstract,
           p.assignee_state.value_or(""), cpc});
  }
  return w.str();
}

std::string render_citations(std::span<const CitationEdge> edges) {
  csv::Writer w{"citing_id", "cited_id"};
  for (const auto& e : edges) w.row({e.citing_id, e.cited_id});
  return w.str();
}

std::string render_tasks(std::span<const TaskRecord> tasks) {
  csv::Writer w{"task_id", "description", "occupation_code"};
  for (const auto& t : tasks) w.row({t.task_id, t.description, t.occupation_code});
  return w.str();
}

std::string render_industry_map(const IndustryMap& map) {
  csv::Writer w{"occupation_code", "industry_sector"};
  for (const auto& [occ, sector] : map.sector_of) w.row({occ, sector});
  return w.str();
}

std::string render_vacancies(const VacancyTable& table) {
  csv::Writer w{"industry_sector", "vacancy_rate"};
  for (const auto& [sector, rate] : table.rate) w.row({sector, csv::format_double(rate)});
  return w.str();
}

}  // namespace aix::corpus
