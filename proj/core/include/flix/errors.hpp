#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flix {

/// Malformed input record; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An iterative routine hit its iteration cap before the residual target.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& message, long iterations, double residual)
      : std::runtime_error(message + " (iterations=" + std::to_string(iterations) +
                           ", residual=" + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  long iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  long iterations_;
  double residual_;
};

/// A solver produced a non-finite iterate; carries the round index.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& message, long round)
      : std::runtime_error(message + " at round " + std::to_string(round)),
        round_(round) {}

  long round() const noexcept { return round_; }

 private:
  long round_;
};

class InternalConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace flix
