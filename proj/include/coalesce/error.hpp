#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace coalesce {

enum class ErrorKind {
  MalformedRational,
  MalformedInput,
  NonSquare,
  RowSumNotOne,
  EntryOutOfRange,
  DimensionMismatch,
  NotIrreducible,
  NotDoublyStochastic,
  NotADivisor,
  BlockConditionsFail,
  SupportTooLarge,
  ClosureTooLarge,
  BudgetExceeded,
  TooManyStates,
};

const char* to_string(ErrorKind kind);

// True for the kinds that signal a configured cap was hit rather than bad input.
bool is_budget_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Row index is 0-based; the message reports it 1-based.
class RowSumError : public Error {
 public:
  RowSumError(std::size_t row, const std::string& sum);

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace coalesce
