#pragma once

#include <stdexcept>
#include <string>

namespace aqnn {

// Bad argument (non-positive epsilon, unknown name, too few pieces, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation undefined for the given input (parallel tangents, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Two tangent lines that never meet.
class NoIntersection : public DomainError {
 public:
  using DomainError::DomainError;
};

class InvalidPolygon : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SelfIntersectingPolygon : public InvalidPolygon {
 public:
  using InvalidPolygon::InvalidPolygon;
};

class DegenerateCell : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedOrder : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedMetric : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A training run that had to stop; the message names the epoch.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace aqnn
