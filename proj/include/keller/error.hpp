#ifndef KELLER_ERROR_HPP
#define KELLER_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace keller {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidExponentError : public Error {
public:
  using Error::Error;
};

/// Operands live on different measures or grids.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// Input is identically zero (or otherwise degenerate) where a nonzero one is required.
class DegenerateInputError : public Error {
public:
  using Error::Error;
};

class PreconditionError : public Error {
public:
  using Error::Error;
};

class UnsupportedChannelError : public Error {
public:
  using Error::Error;
};

class UnsupportedShiftError : public Error {
public:
  using Error::Error;
};

class StepSizeError : public Error {
public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap. Carries the best iterate found.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string &what, std::vector<double> best_iterate,
                   double best_residual)
      : Error(what), best_iterate_(std::move(best_iterate)),
        best_residual_(best_residual) {}

  const std::vector<double> &best_iterate() const { return best_iterate_; }
  double best_residual() const { return best_residual_; }

private:
  std::vector<double> best_iterate_;
  double best_residual_;
};

} // namespace keller

#endif // KELLER_ERROR_HPP
