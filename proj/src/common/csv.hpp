#pragma once

// RFC 4180 CSV with a mandatory header row.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aix::csv {

struct Record {
  std::size_t line = 0;  // physical line where the record starts
  std::vector<std::string> fields;
};

class Table {
public:
  static Table parse(std::string_view text, std::string source);
  static Table read_file(const std::filesystem::path& path);

  const std::string& source() const noexcept { return source_; }
  const std::vector<std::string>& header() const noexcept { return header_; }
  std::span<const Record> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

  // Throws DataError unless the header is exactly `expected`.
  void require_header(std::initializer_list<std::string_view> expected) const;

  std::size_t column_index(std::string_view name) const;

private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<Record> records_;
};

// Accumulates rows into a string buffer. Fields are quoted only when needed.
class Writer {
public:
  explicit Writer(std::initializer_list<std::string_view> header);

  void row(std::initializer_list<std::string_view> fields);
  void row(std::span<const std::string> fields);

  const std::string& str() const noexcept { return out_; }

private:
  void append_field(std::string_view field, bool first);

  std::string out_;
  std::size_t width_;
};

std::string escape(std::string_view field);

// Number formatting and parsing shared by every CSV/JSON emitter. Doubles use
// the shortest representation that round-trips exactly.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value);

double parse_double(const Table& table, const Record& rec, std::size_t col);
std::optional<double> parse_optional_double(const Table& table, const Record& rec,
                                            std::size_t col);
std::uint64_t parse_uint(const Table& table, const Record& rec, std::size_t col);
std::int64_t parse_int(const Table& table, const Record& rec, std::size_t col);

}  // namespace aix::csv
