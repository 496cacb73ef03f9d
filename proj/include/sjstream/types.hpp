#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace sjstream {

using VertexId = std::uint32_t;
using EdgeId = std::uint64_t;
// Integer time units chosen by the caller (epoch seconds, ticks, ...).
using Timestamp = std::int64_t;

enum class VertexType : std::uint16_t {};
enum class EdgeType : std::uint16_t {};

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();

constexpr std::uint16_t to_index(VertexType t) {
  return static_cast<std::uint16_t>(t);
}
constexpr std::uint16_t to_index(EdgeType t) {
  return static_cast<std::uint16_t>(t);
}

// Error hierarchy. Everything thrown by the library derives from Error so the
// CLI can map families of failures onto exit codes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class SchemaViolation : public Error {
 public:
  using Error::Error;
};

class TimestampRegression : public Error {
 public:
  using Error::Error;
};

class UnknownVertex : public Error {
 public:
  using Error::Error;
};

class UnknownEdge : public Error {
 public:
  using Error::Error;
};

class DomainMismatch : public Error {
 public:
  using Error::Error;
};

class DuplicateMatch : public Error {
 public:
  using Error::Error;
};

class NotAStar : public Error {
 public:
  using Error::Error;
};

class SizeGuardExceeded : public Error {
 public:
  using Error::Error;
};

class InsufficientLabels : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& reason)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + reason),
        line_(line),
        column_(column),
        reason_(reason) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

}  // namespace sjstream
