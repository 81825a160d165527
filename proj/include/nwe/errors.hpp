#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nwe {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad input: shape mismatch, parameter outside its domain, broken invariant.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// An iterative kernel did not converge within its budget.
class NumericError : public Error {
  public:
    using Error::Error;
};

/// A matrix function was asked to evaluate outside its domain.
class DomainError : public Error {
  public:
    using Error::Error;
};

class SpanError : public Error {
  public:
    SpanError(const std::string& what, double residual)
        : Error(what + " (relative residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

/// A measurement outcome responds to a state it is not supposed to identify.
class AmbiguityError : public Error {
  public:
    AmbiguityError(std::size_t outcome, std::size_t state, double response)
        : Error("outcome " + std::to_string(outcome) + " responds to state " +
                std::to_string(state) + " with probability " + std::to_string(response)),
          outcome_(outcome), state_(state) {}
    std::size_t outcome() const noexcept { return outcome_; }
    std::size_t state() const noexcept { return state_; }

  private:
    std::size_t outcome_;
    std::size_t state_;
};

class InfeasibleError : public Error {
  public:
    InfeasibleError(const std::string& what, double maxFeasible)
        : Error(what + " (max feasible efficiency " + std::to_string(maxFeasible) + ")"),
          maxFeasible_(maxFeasible) {}
    double max_feasible() const noexcept { return maxFeasible_; }

  private:
    double maxFeasible_;
};

class DegeneracyError : public Error {
  public:
    using Error::Error;
};

} // namespace nwe
