#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace isindy {

/// Failure categories raised across the library. Each maps to a named
/// error condition of the identification pipeline.
enum class ErrorKind {
  DimensionMismatch,
  DenominatorZero,
  IntegrationFailure,
  NonFiniteState,
  UnknownBenchmark,
  MissingParameter,
  TooFewSamples,
  NonUniformGrid,
  EmptyData,
  ZeroColumn,
  EmptyNullSpace,
  NumericalFailure,
  DegenerateLambda,
  RankDeficientActiveSet,
  AllTermsEliminated,
  NoValidCandidates,
  EmptyFront,
  NoDenominatorTerms,
  DegreeOverflow,
  InvalidArgument,
  Io,
  Schema,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace isindy
