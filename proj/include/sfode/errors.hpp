#pragma once

#include <stdexcept>
#include <string>

namespace sfode {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (dimension mismatch, bad config).
class ContractError : public Error {
 public:
  using Error::Error;
};

// An argument lies outside the domain of a map or solution.
class DomainError : public Error {
 public:
  using Error::Error;
};

// No reconstructing rank-1 lattice was found below the size cap.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

// Multiple rank-1 lattice search ran out of restarts.
class ExhaustionError : public Error {
 public:
  using Error::Error;
};

// The sparse FFT exceeded its sample or candidate budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// A numerical requirement of the problem failed at a sampled point, e.g.
// a nonpositive diffusion coefficient or a vanishing denominator.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Wraps an error raised inside one solver stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace sfode
