#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hsdcov {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied a value outside an operation's domain (bad alpha, bad
/// bandwidth, malformed option value).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Estimators built on U-centering need n >= 4.
class SampleTooSmall : public Error {
 public:
  SampleTooSmall(std::size_t n, std::size_t required)
      : Error("sample size " + std::to_string(n) + " is below the minimum of " +
              std::to_string(required)),
        n_(n),
        required_(required) {}

  std::size_t n() const noexcept { return n_; }
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t n_;
  std::size_t required_;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

/// All pairwise distances vanish, so a data-driven bandwidth is undefined.
class DegenerateSample : public Error {
 public:
  using Error::Error;
};

/// Kernel derivative at rho is numerically zero; the kernel scaling factor
/// is meaningless there.
class DegenerateKernel : public Error {
 public:
  using Error::Error;
};

/// Perturbation too large for the minimax prior: |a| p q >= 1 makes
/// Sigma_{u,v}(a) indefinite.
class InvalidConstruction : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Wraps a failure inside one Monte-Carlo replication.
class ReplicationError : public Error {
 public:
  ReplicationError(std::size_t replication, const std::string& cause)
      : Error("replication " + std::to_string(replication) + ": " + cause),
        replication_(replication) {}

  std::size_t replication() const noexcept { return replication_; }

 private:
  std::size_t replication_;
};

}  // namespace hsdcov
