#include "common/csv.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "common/error.hpp"
#include "common/io.hpp"

namespace aix::csv {

namespace {

std::vector<Record> split_records(std::string_view text, const std::string& source) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<Record> out;
  Record cur;
  std::string field;
  std::size_t line = 1;
  std::size_t i = 0;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_open = false;

  auto end_field = [&] {
    cur.fields.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    out.push_back(std::move(cur));
    cur = Record{};
    record_open = false;
  };

  while (i < text.size()) {
    char c = text[i];
    if (!record_open) {
      cur.line = line;
      record_open = true;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted)
          throw DataError(source, line, "", "quote character inside an unquoted field");
        in_quotes = true;
        field_was_quoted = true;
        ++i;
        break;
      case ',':
        end_field();
        ++i;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        ++i;
        break;
      default:
        if (field_was_quoted)
          throw DataError(source, line, "", "characters after closing quote");
        field.push_back(c);
        ++i;
    }
  }
  if (in_quotes) throw DataError(source, cur.line, "", "unterminated quoted field");
  if (record_open) end_record();
  return out;
}

}  // namespace

Table Table::parse(std::string_view text, std::string source) {
  Table t;
  t.source_ = std::move(source);
  auto recs = split_records(text, t.source_);
  // A lone empty field is a blank line.
  std::erase_if(recs, [](const Record& r) {
    return r.fields.size() == 1 && r.fields.front().empty();
  });
  if (recs.empty()) throw DataError(t.source_, 0, "", "missing header row");
  t.header_ = std::move(recs.front().fields);
  for (std::size_t k = 1; k < recs.size(); ++k) {
    if (recs[k].fields.size() != t.header_.size())
      throw DataError(t.source_, recs[k].line, "",
                      fmt::format("expected {} fields, found {}", t.header_.size(),
                                  recs[k].fields.size()));
    t.records_.push_back(std::move(recs[k]));
  }
  return t;
}

Table Table::read_file(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.filename().string());
}

void Table::require_header(std::initializer_list<std::string_view> expected) const {
  bool ok = expected.size() == header_.size();
  std::size_t k = 0;
  for (auto name : expected) {
    if (!ok) break;
    ok = header_[k++] == name;
  }
  if (!ok) {
    std::string want;
    for (auto name : expected) {
      if (!want.empty()) want += ',';
      want += name;
    }
    throw DataError(source_, 1, "", fmt::format("header must be '{}'", want));
  }
}

std::size_t Table::column_index(std::string_view name) const {
  for (std::size_t k = 0; k < header_.size(); ++k)
    if (header_[k] == name) return k;
  throw DataError(source_, 1, std::string(name), "column not present in header");
}

std::string escape(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos ||
               (!field.empty() && (field.front() == ' ' || field.back() == ' '));
  if (!needs) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Writer::Writer(std::initializer_list<std::string_view> header) : width_(header.size()) {
  row(header);
}

void Writer::append_field(std::string_view field, bool first) {
  if (!first) out_.push_back(',');
  out_ += escape(field);
}

void Writer::row(std::initializer_list<std::string_view> fields) {
  if (fields.size() != width_)
    fail(ErrorKind::Internal, "csv row has {} fields, header has {}", fields.size(), width_);
  bool first = true;
  for (auto f : fields) {
    append_field(f, first);
    first = false;
  }
  out_.push_back('\n');
}

void Writer::row(std::span<const std::string> fields) {
  if (fields.size() != width_)
    fail(ErrorKind::Internal, "csv row has {} fields, header has {}", fields.size(), width_);
  for (std::size_t k = 0; k < fields.size(); ++k) append_field(fields[k], k == 0);
  out_.push_back('\n');
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{}", value);
}

std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

double parse_double(const Table& table, const Record& rec, std::size_t col) {
  const auto& s = rec.fields.at(col);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw DataError(table.source(), rec.line, table.header()[col],
                    fmt::format("'{}' is not a finite number", s));
  return v;
}

std::optional<double> parse_optional_double(const Table& table, const Record& rec,
                                            std::size_t col) {
  if (rec.fields.at(col).empty()) return std::nullopt;
  return parse_double(table, rec, col);
}

std::uint64_t parse_uint(const Table& table, const Record& rec, std::size_t col) {
  const auto& s = rec.fields.at(col);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(table.source(), rec.line, table.header()[col],
                    fmt::format("'{}' is not a non-negative integer", s));
  return v;
}

std::int64_t parse_int(const Table& table, const Record& rec, std::size_t col) {
  const auto& s = rec.fields.at(col);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw DataError(table.source(), rec.line, table.header()[col],
                    fmt::format("'{}' is not an integer", s));
  return v;
}

}  // namespace aix::csv
