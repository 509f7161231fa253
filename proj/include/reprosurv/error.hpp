#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reprosurv {

/// Root of every error raised by the toolkit. `category()` drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  enum class Category { argument, data, numeric };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(Category::argument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(Category::argument, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what) : Error(Category::data, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::string column)
      : Error(Category::data, what), row_(row), column_(std::move(column)) {}

  /// 1-based data row (header excluded).
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class EncodingError : public Error {
 public:
  explicit EncodingError(const std::string& what) : Error(Category::data, what) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error(Category::numeric, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(Category::numeric, what) {}
};

/// Newton iterations ran out; carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate)
      : Error(Category::numeric, what), last_iterate_(std::move(last_iterate)) {}

  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  std::vector<double> last_iterate_;
};

}  // namespace reprosurv
