#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mols {

/// A column that should extend the basis is numerically inside its span.
struct RankDeficiencyError : std::runtime_error {
  explicit RankDeficiencyError(int column)
      : std::runtime_error("column " + std::to_string(column) +
                           " is numerically in the span of the current basis"),
        column_index(column) {}
  int column_index;
};

/// Fewer admissible candidates remain than the selection rule needs.
struct ExhaustedCandidatesError : std::runtime_error {
  ExhaustedCandidatesError(int requested, int available)
      : std::runtime_error("selection needs " + std::to_string(requested) +
                           " candidates but only " + std::to_string(available) +
                           " are admissible"),
        requested(requested),
        available(available) {}
  int requested;
  int available;
};

/// Support enumeration would exceed the configured budget.
struct EnumerationTooLargeError : std::runtime_error {
  explicit EnumerationTooLargeError(std::uint64_t count)
      : std::runtime_error("support enumeration of " + std::to_string(count) +
                           " subsets exceeds the budget"),
        support_count(count) {}
  std::uint64_t support_count;
};

/// A bound check needs an isometry constant the report does not contain.
struct MissingOrderError : std::runtime_error {
  explicit MissingOrderError(int order)
      : std::runtime_error("isometry constant of order " +
                           std::to_string(order) + " is not available"),
        order(order) {}
  int order;
};

/// Malformed text input; carries the 1-based line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line(line) {}
  int line;
};

}  // namespace mols
