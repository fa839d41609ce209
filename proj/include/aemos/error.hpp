/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aemos {

/// Broad error classes; the CLI maps them onto exit codes 2, 3 and 4.
enum class ErrorCategory { Input, Numeric, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Malformed files, failed validation, unusable datasets.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorCategory::Input, what) {}
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : InputError(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

class DatasetError : public InputError {
 public:
  using InputError::InputError;
};

/// Argument outside the mathematical domain of an operation (sigma <= 0, ...).
class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::Numeric, what) {}
};

/// Spatial drift functions are linearly dependent on the station set.
class DriftDegeneracyError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ModelError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Optimizer ran out of budget; carries the best point seen.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best, double best_value)
      : NumericError(what), best_(std::move(best)), best_value_(best_value) {}
  const std::vector<double>& best_iterate() const noexcept { return best_; }
  double best_value() const noexcept { return best_value_; }

 private:
  std::vector<double> best_;
  double best_value_;
};

}  // namespace aemos
