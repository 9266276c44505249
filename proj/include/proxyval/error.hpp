#pragma once

#include <stdexcept>
#include <string>

namespace proxyval {

// Base for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument to a numerical kernel or analysis (s<=0, span too small,
// zero variance, ...). `kind` is a stable name tests can match on.
class DomainError : public Error {
public:
  DomainError(std::string kind, const std::string& detail)
      : Error(kind + (detail.empty() ? "" : ": " + detail)), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

private:
  std::string kind_;
};

// Bad flags / unusable run configuration.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

enum class ParseErrorCode {
  MissingColumn,
  BadDate,
  BadMonth,
  BadNumber,
  NonPositiveQuantity,
  EmptyField,
  DuplicateProductId,
  UnknownCategory,
  UnknownFoodForm,
  NonContiguousMonths,
  NegativeCount,
  UnknownGroup,
  DuplicateAnimalId,
  BadRow,
};

const char* parse_error_name(ParseErrorCode code);

// Loader error; line is 1-based over the physical file (0 = header/file level).
class ParseError : public Error {
public:
  ParseError(ParseErrorCode code, std::size_t line, const std::string& detail);
  ParseErrorCode code() const { return code_; }
  std::size_t line() const { return line_; }

private:
  ParseErrorCode code_;
  std::size_t line_;
};

}  // namespace proxyval
