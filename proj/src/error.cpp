#include "coalesce/error.hpp"

namespace coalesce {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRational: return "MalformedRational";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::RowSumNotOne: return "RowSumNotOne";
    case ErrorKind::EntryOutOfRange: return "EntryOutOfRange";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::NotDoublyStochastic: return "NotDoublyStochastic";
    case ErrorKind::NotADivisor: return "NotADivisor";
    case ErrorKind::BlockConditionsFail: return "BlockConditionsFail";
    case ErrorKind::SupportTooLarge: return "SupportTooLarge";
    case ErrorKind::ClosureTooLarge: return "ClosureTooLarge";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::TooManyStates: return "TooManyStates";
  }
  return "Unknown";
}

bool is_budget_error(ErrorKind kind) {
  return kind == ErrorKind::SupportTooLarge || kind == ErrorKind::ClosureTooLarge ||
         kind == ErrorKind::BudgetExceeded;
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

RowSumError::RowSumError(std::size_t row, const std::string& sum)
    : Error(ErrorKind::RowSumNotOne,
            "row " + std::to_string(row + 1) + " sums to " + sum + ", expected 1"),
      row_(row) {}

}  // namespace coalesce
