// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hmortar {

/// Non-finite integrand or otherwise failed numerical integration.
class AssemblyError : public std::runtime_error {
 public:
  AssemblyError(const std::string& what, int element)
      : std::runtime_error(what + " (element " + std::to_string(element) + ")"),
        element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// Factorization or eigensolver breakdown.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The multiplier space is too rich for the field space: B A^{-1} B^T is
/// singular to working precision.
class InfSupViolation : public NumericalError {
 public:
  InfSupViolation(double min_eig, double max_eig)
      : NumericalError(
            "inf-sup violated / multiplier space too rich: smallest Schur "
            "eigenvalue " +
            std::to_string(min_eig) + " vs largest " + std::to_string(max_eig)),
        min_eig_(min_eig),
        max_eig_(max_eig) {}
  double min_eig() const { return min_eig_; }
  double max_eig() const { return max_eig_; }

 private:
  double min_eig_;
  double max_eig_;
};

}  // namespace hmortar
