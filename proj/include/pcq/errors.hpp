// Copyright 2026 The pcq Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef PCQ_ERRORS_HPP_
#define PCQ_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcq {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A metric was asked for over a set with no points.
class EmptySetError : public Error {
 public:
  EmptySetError() : Error("point set is empty") {}
};

class NonFiniteInputError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters (profile, grid, weight scheme, CLI flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed row in a text frame. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A field parsed fine but is outside its admissible range.
class RangeError : public Error {
 public:
  RangeError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class TruncationError : public Error {
 public:
  TruncationError(std::size_t expected, std::size_t actual)
      : Error("truncated payload: expected " + std::to_string(expected) +
              " bytes, got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class DuplicateFrameIdError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcq

#endif  // PCQ_ERRORS_HPP_
