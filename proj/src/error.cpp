#include "proxyval/error.hpp"

namespace proxyval {

const char* parse_error_name(ParseErrorCode code) {
  switch (code) {
    case ParseErrorCode::MissingColumn: return "MissingColumn";
    case ParseErrorCode::BadDate: return "BadDate";
    case ParseErrorCode::BadMonth: return "BadMonth";
    case ParseErrorCode::BadNumber: return "BadNumber";
    case ParseErrorCode::NonPositiveQuantity: return "NonPositiveQuantity";
    case ParseErrorCode::EmptyField: return "EmptyField";
    case ParseErrorCode::DuplicateProductId: return "DuplicateProductId";
    case ParseErrorCode::UnknownCategory: return "UnknownCategory";
    case ParseErrorCode::UnknownFoodForm: return "UnknownFoodForm";
    case ParseErrorCode::NonContiguousMonths: return "NonContiguousMonths";
    case ParseErrorCode::NegativeCount: return "NegativeCount";
    case ParseErrorCode::UnknownGroup: return "UnknownGroup";
    case ParseErrorCode::DuplicateAnimalId: return "DuplicateAnimalId";
    case ParseErrorCode::BadRow: return "BadRow";
  }
  return "Unknown";
}

ParseError::ParseError(ParseErrorCode code, std::size_t line, const std::string& detail)
    : Error(std::string(parse_error_name(code)) + " at line " + std::to_string(line) +
            (detail.empty() ? "" : ": " + detail)),
      code_(code),
      line_(line) {}

}  // namespace proxyval
