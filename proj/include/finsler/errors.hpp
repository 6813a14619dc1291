// SPDX-License-Identifier: Apache-2.0
#ifndef FINSLER_ERRORS_HPP
#define FINSLER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace finsler {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A quantity left the admissible region of its defining formulas
/// (nonpositive Lemma-2.1 denominator, s outside |s| <= b, phi <= 0, ...).
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: non-SPD pivot in a Cholesky solve,
/// quadrature non-convergence, vanishing zeta denominator.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (bad JSON, unknown key, unknown catalog id).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling could not find an admissible point.
class SamplingExhausted : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler

#endif
