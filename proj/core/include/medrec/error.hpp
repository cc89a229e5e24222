#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace medrec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or inconsistent inputs supplied by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  GridMismatch(int expected, int actual)
      : Error("grid mismatch: expected N=" + std::to_string(expected) +
              ", got N=" + std::to_string(actual)) {}
};

// Pure-Neumann problem (mu == 0) whose data do not integrate to zero.
class IncompatibleProblem : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual, int iterations)
      : Error(what + " (relative residual " + std::to_string(residual) +
              " after " + std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace medrec
