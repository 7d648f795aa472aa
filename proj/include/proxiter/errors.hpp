#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace proxiter {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (dimension mismatch, bad index, ...).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// A halfspace intersection with no feasible point.
class InfeasibleSet : public Error {
public:
  using Error::Error;
};

/// An iterative routine ran out of iterations. Carries its best estimate.
class NonConvergence : public Error {
public:
  NonConvergence(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}
  double best_estimate() const noexcept { return best_estimate_; }

private:
  double best_estimate_;
};

/// Three distances that cannot come from a normed space.
class InconsistentDistances : public Error {
public:
  using Error::Error;
};

/// A contraction constant whose denominator is not positive.
class DivisionRegime : public Error {
public:
  using Error::Error;
};

/// bound_check called on a branch whose precondition does not hold.
class BranchMismatch : public Error {
public:
  using Error::Error;
};

/// A point outside every region of a piecewise map.
class UndefinedMap : public Error {
public:
  using Error::Error;
};

/// A cyclic orbit left the set it was supposed to land in.
class CyclicityViolation : public Error {
public:
  CyclicityViolation(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// Scenario or schedule text that does not parse. `where` is a line or a
/// JSON pointer to the offending field.
class ParseError : public Error {
public:
  ParseError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

private:
  std::string where_;
};

/// A parsed value that breaks a named type invariant.
class InvariantViolation : public Error {
public:
  InvariantViolation(std::string invariant, const std::string& what)
      : Error(invariant + ": " + what), invariant_(std::move(invariant)) {}
  const std::string& invariant() const noexcept { return invariant_; }

private:
  std::string invariant_;
};

}  // namespace proxiter
