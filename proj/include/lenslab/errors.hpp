#pragma once

#include <stdexcept>
#include <string>

namespace lenslab {

// Root of every error the library throws. Diagnostics that are not failures
// (validate_system, coupling_violations) are returned as values instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected,
                    std::size_t got)
      : Error(what + ": expected dimension " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
  using Error::Error;
};

class InvalidPermutation : public Error {
 public:
  using Error::Error;
};

class InvalidSystem : public Error {
 public:
  using Error::Error;
};

class InvalidCoupling : public Error {
 public:
  using Error::Error;
};

class NegativePowerOfStochastic : public Error {
 public:
  NegativePowerOfStochastic()
      : Error("negative power requested for a stochastic (non-invertible) system") {}
};

class NotExact : public Error {
 public:
  explicit NotExact(const std::string& op)
      : Error(op + " requires an exact (permutation) system") {}
};

// Raised when a requested resolution exceeds the configured work limits.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

class NotRepairable : public Error {
 public:
  using Error::Error;
};

class BadBlocks : public Error {
 public:
  using Error::Error;
};

class InfeasibleTarget : public Error {
 public:
  using Error::Error;
};

class NonInvertible : public Error {
 public:
  using Error::Error;
};

class UnknownExperiment : public Error {
 public:
  explicit UnknownExperiment(const std::string& name)
      : Error("unknown experiment '" + name + "' (run `lens-lab list` for the registry)") {}
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace lenslab
