#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace aix {

// Coarse error classes; the C API and the CLI exit codes are derived from these.
enum class ErrorKind {
  Usage,
  Config,
  Data,
  Io,
  MissingArtifact,
  Network,
  Internal,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// A data error tied to a position in an input file. line is 1-based, 0 when
// the error is not tied to one row.
class DataError : public Error {
public:
  DataError(std::string source, std::size_t line, std::string column,
            const std::string& message)
      : Error(ErrorKind::Data, format(source, line, column, message)),
        source_(std::move(source)),
        line_(line),
        column_(std::move(column)) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& column() const noexcept { return column_; }

private:
  static std::string format(const std::string& source, std::size_t line,
                            const std::string& column, const std::string& message) {
    std::string out = source;
    if (line > 0) out += fmt::format(":{}", line);
    if (!column.empty()) out += fmt::format(": column '{}'", column);
    out += ": ";
    out += message;
    return out;
  }

  std::string source_;
  std::size_t line_;
  std::string column_;
};

template <class... Args>
[[noreturn]] void fail(ErrorKind kind, fmt::format_string<Args...> f, Args&&... args) {
  throw Error(kind, fmt::format(f, std::forward<Args>(args)...));
}

// Non-fatal conditions an operation wants surfaced to the caller.
using Warnings = std::vector<std::string>;

}  // namespace aix
