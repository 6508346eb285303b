#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace selmod {

// Argument outside the domain of a distribution, link or mechanism.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Response value outside the support of the family.
class SupportError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// Design matrix without full column rank.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double gradient_norm)
      : std::runtime_error(what), gradient_norm_(gradient_norm) {}
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  double gradient_norm_;
};

// Malformed input file or model specification. Row and column are 1-based;
// zero means "not applicable".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::size_t row = 0, std::string column = {})
      : std::runtime_error(what), row_(row), column_(std::move(column)) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace selmod
