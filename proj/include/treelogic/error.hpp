#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treelogic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sort/arity violations: node term where a set was expected, wrong Apply
// arity, undeclared names, and the like.
class SortError : public Error {
 public:
  using Error::Error;
};

// A configurable resource limit was hit (subset budget, automaton state cap).
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Half-open byte range [begin, end) plus the 1-based line/column of begin.
struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 1;
  int column = 1;

  bool operator==(const SourceSpan&) const = default;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceSpan span)
      : Error(message + " at line " + std::to_string(span.line) + ", column " +
              std::to_string(span.column)),
        span_(span) {}

  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

}  // namespace treelogic
