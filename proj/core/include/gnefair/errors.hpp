#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gnefair {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument that violates a documented precondition (a_i <= 0, dim mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A cost was evaluated outside its domain, or a fairness metric outside its own.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidWeights : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NotAffine : public Error {
 public:
  using Error::Error;
};

class InfeasibleSet : public Error {
 public:
  using Error::Error;
};

class InfeasibleResidual : public Error {
 public:
  using Error::Error;
};

class NoValidPattern : public Error {
 public:
  using Error::Error;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class NotStationary : public Error {
 public:
  using Error::Error;
};

class MissingBenchmark : public Error {
 public:
  using Error::Error;
};

class AllPointsFailed : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class UnknownScenario : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Iterative solver hit its iteration cap.
class NoConvergence : public Error {
 public:
  NoConvergence(int iterations, double residual, std::string context = {});

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Configuration document is not well-formed.
class ParseError : public Error {
 public:
  using Error::Error;
};

struct FieldError {
  std::string path;
  std::string message;
};

/// Configuration document violates the schema; carries every violation found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldError> errors);

  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

}  // namespace gnefair
