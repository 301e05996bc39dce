#pragma once

#include <stdexcept>
#include <string>

namespace bhf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid GridConfig, solver config, or CLI flag combination.
struct ConfigError : Error {
  using Error::Error;
};

// Operator expected to be positive semidefinite has an eigenvalue below the
// clamping threshold.
struct NotPsdError : Error {
  NotPsdError(const std::string& what, double min_eig)
      : Error(what), min_eigenvalue(min_eig) {}
  double min_eigenvalue;
};

// Operator lies outside HS_eps, i.e. has an eigenvalue below -eps.
struct NotInDomainError : Error {
  NotInDomainError(const std::string& what, double min_eig)
      : Error(what), min_eigenvalue(min_eig) {}
  double min_eigenvalue;
};

struct DimensionError : Error {
  using Error::Error;
};

// A symmetric positive-definite solve failed; with the infrared cutoff in
// place this indicates an internal error, not bad user input.
struct LinearSolveError : Error {
  using Error::Error;
};

// The counterexample construction could not produce a usable (psi, phi) pair.
struct DegenerateConstructionError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace bhf
