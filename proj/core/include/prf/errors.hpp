#pragma once

#include <stdexcept>
#include <string>

namespace prf {

// A requested filter configuration cannot be built within its memory budget.
class InfeasibleDesignError : public std::runtime_error {
 public:
  explicit InfeasibleDesignError(const std::string& what)
      : std::runtime_error(what) {}
};

// An operation that requires an empty query was handed one that intersects
// the key set.
class NotEmptyError : public std::runtime_error {
 public:
  explicit NotEmptyError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or truncated input file.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace prf
