#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace linkeng {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// expression / scenario parsing
struct SyntaxError : Error {
  SyntaxError(std::size_t offset_, const std::string& expected_,
              const std::string& msg)
      : Error(msg), offset(offset_), expected(expected_) {}
  std::size_t offset;
  std::string expected;
};

struct UnknownIdentifier : Error {
  using Error::Error;
};

struct PeriodicityViolation : Error {
  using Error::Error;
};

// evaluation
struct DomainError : Error {
  using Error::Error;
};

// solver
struct NonTransverse : Error {
  NonTransverse(const std::string& msg, std::vector<double> loc = {})
      : Error(msg), location(std::move(loc)) {}
  std::vector<double> location;
};

struct ResolutionUnstable : Error {
  using Error::Error;
};

struct StepCollapse : Error {
  StepCollapse(const std::string& msg, std::vector<double> loc = {})
      : Error(msg), location(std::move(loc)) {}
  std::vector<double> location;
};

// link invariants
struct EndpointNotLink : Error {
  using Error::Error;
};

struct BoundaryProximity : Error {
  BoundaryProximity(const std::string& msg, std::vector<double> loc = {})
      : Error(msg), location(std::move(loc)) {}
  std::vector<double> location;
};

struct ValidationError : Error {
  using Error::Error;
};

struct MethodDisagreement : Error {
  using Error::Error;
};

}  // namespace linkeng
