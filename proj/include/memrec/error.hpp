#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace memrec {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// subtract() called with a right operand that is not contained in the left.
class NotSubMultiset : public Error {
 public:
  using Error::Error;
};

// A multiplicity left the 64-bit range.
class CountOverflow : public Error {
 public:
  using Error::Error;
};

class InvalidSymbol : public Error {
 public:
  using Error::Error;
};

// Operation needs a structurally valid system.
class InvalidSystem : public Error {
 public:
  using Error::Error;
};

// Malformed psys-v1 or trace JSON.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Exhaustive enumeration produced more candidates than allowed.
class BranchLimitExceeded : public Error {
 public:
  BranchLimitExceeded(std::size_t limit)
      : Error("branch limit exceeded (max " + std::to_string(limit) + ")"),
        limit_(limit) {}
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
};

// apply_step() was handed an instance set that is not admissible or not maximal.
class IllegalInstanceSet : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t column, std::string expected)
      : Error("syntax error at column " + std::to_string(column) + ": expected " +
              expected),
        column_(column),
        expected_(std::move(expected)) {}

  // 1-based column of the offending character (or one past the end).
  std::size_t column() const noexcept { return column_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t column_;
  std::string expected_;
};

class ArityError : public Error {
 public:
  ArityError(std::string path, std::string found, std::string required)
      : Error("arity error at " + path + ": found " + found + ", required " +
              required),
        path_(std::move(path)),
        found_(std::move(found)),
        required_(std::move(required)) {}

  const std::string& path() const noexcept { return path_; }
  const std::string& found() const noexcept { return found_; }
  const std::string& required() const noexcept { return required_; }

 private:
  std::string path_, found_, required_;
};

// Argument list length differs from the function's arity.
class ArityMismatch : public Error {
 public:
  ArityMismatch(std::size_t expected, std::size_t got)
      : Error("expected " + std::to_string(expected) + " argument(s), got " +
              std::to_string(got)),
        expected_(expected),
        got_(got) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_, got_;
};

}  // namespace memrec
