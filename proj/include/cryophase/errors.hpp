#pragma once

#include <cstdio>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace cryophase {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Pointwise function evaluated outside its domain (e.g. theta <= 0).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Rejected user input: parameters, grids, configs, study requests.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class NonConvergence : public Error {
public:
  NonConvergence(std::string solver, std::size_t iterations, double residual,
                 const std::string &hint = {})
      : Error(solver + " did not converge after " + std::to_string(iterations) +
              " iterations (residual " + short_sci(residual) + ")" +
              (hint.empty() ? std::string{} : "; " + hint)),
        solver_(std::move(solver)), iterations_(iterations), residual_(residual) {}

  NonConvergence(const NonConvergence &inner, const std::string &context)
      : Error(context + ": " + inner.what()), solver_(inner.solver_),
        iterations_(inner.iterations_), residual_(inner.residual_) {}

  const std::string &solver() const noexcept { return solver_; }
  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

private:
  static std::string short_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }

  std::string solver_;
  std::size_t iterations_;
  double residual_;
};

/// Krylov breakdown or non-finite data inside a linear solve.
class LinearSolveFailure : public Error {
public:
  using Error::Error;
};

/// A verification study measured an order below its threshold, or a
/// monotonicity assertion of a study failed.
class OrderRegression : public Error {
public:
  using Error::Error;
};

} // namespace cryophase
