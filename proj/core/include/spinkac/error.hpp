// Copyright 2026 The spinkac Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace spinkac {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem size beyond what dense enumeration supports.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Iterative method failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
  NumericError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// Input violates a documented precondition (e.g. a field not constant on blocks).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Not enough data to fit a rate.
class FitError : public Error {
 public:
  using Error::Error;
};

// Malformed model file or command-line value.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinkac
