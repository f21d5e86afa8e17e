#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sepcd/types.hpp"

namespace sepcd {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The separation-node set swallowed the whole graph: no community cores
// remain to seed an assignment. The raw set is kept for diagnostics.
class DegenerateOutcome : public Error {
 public:
  DegenerateOutcome(const std::string& what, std::vector<NodeId> sep_set)
      : Error(what), sep_set_(std::move(sep_set)) {}

  const std::vector<NodeId>& sep_set() const noexcept { return sep_set_; }

 private:
  std::vector<NodeId> sep_set_;
};

}  // namespace sepcd
