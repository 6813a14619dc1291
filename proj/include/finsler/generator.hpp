// SPDX-License-Identifier: Apache-2.0
//
// The general solution machinery of the Douglas PDE: the substitution
// variable zeta(b^2, s), the integrating factor xi(b^2), profile functions
// built by quadrature from a free function Phi(zeta), and the
// Psi = iota_3 + iota_4 s^2/(b^2-s^2) reduction.
//
// All antiderivatives are anchored at b2_anchor / s_anchor(b^2); the
// constants this absorbs amount to a fixed Moebius reparametrization of
// Phi's argument plus the free offset h(b^2), so comparisons against
// closed forms must use anchor-free combinations.

#ifndef FINSLER_GENERATOR_HPP
#define FINSLER_GENERATOR_HPP

#include <functional>
#include <utility>

#include "finsler/phi.hpp"

namespace finsler {

struct GeneratorSpec {
  std::function<double(double)> Phi;        // Phi(zeta)
  std::function<double(double)> Phi_prime;  // dPhi/dzeta
  PdeParams params;                         // c, mu, nu of the PDE
  std::function<double(double)> h;          // offset h(b^2)
  double b2_anchor = 0.43;                  // base point of b^2 quadratures
  std::function<double(double)> s_anchor;   // s0(b^2); default sqrt(b2)/2
  std::pair<double, double> b2_range{0.05, 0.81};
  double quad_tol = 1e-11;
  int dim_mode = 3;  // 2 drops the first positivity condition
};

/// zeta(b^2, s) of the general solution, with both inner b^2-integrals
/// anchored at spec.b2_anchor.  Throws NumericError when the denominator
/// vanishes (the excluded chi = 0 branch).
double zeta(const GeneratorSpec& spec, double b2, double s);

/// xi(b^2) = exp( int_{b2_anchor}^{b2} (1-c)/(2u) du ).
double xi_factor(const GeneratorSpec& spec, double b2);

/// phi - s phi_2 = xi(b^2) Phi(zeta) / sqrt(b^2 - s^2) (the anchor-free
/// identity; exact for the quadrature-built phi by construction).
double generator_varphi(const GeneratorSpec& spec, double b2, double s);

/// phi(b^2, s) = s { h(b^2) - xi(b^2) int_{s0}^{s} Phi(zeta)/(t^2
/// sqrt(b^2-t^2)) dt }.  Values come from quadrature; s-partials from the
/// identity above and its s-derivative; b^2-partials from Richardson
/// central differences.  The model serves jets up to order 2 and lives on
/// the s > 0 branch of its anchor.
///
/// Construction verifies the positivity conditions Phi/sqrt(b^2-s^2) > 0
/// and Phi' sqrt(b^2-s^2) > 0 (second only when dim_mode == 2) on a probe
/// grid and throws DomainViolation on failure.
PhiModel phi_from_generator(const GeneratorSpec& spec);

/// phi value by quadrature alone (no composition); exposed for the
/// anchor-free phi/s difference checks.
double generator_phi_value(const GeneratorSpec& spec, double b2, double s);

/// The Lemma 2.3 profile: phi = s { iota_6 - int varphi(t)/t^2 dt } where
/// varphi solves (b^2-s^2) BR varphi_2 = 2 s [(iota4-iota3)s^2 + iota3
/// b^2] varphi with BR = 2(iota4-iota3)s^2 + 2 iota3 b^2 - 1, anchored as
/// varphi(s0) = iota_5.  Its Psi equals iota_3 + iota_4 s^2/(b^2 - s^2).
/// Throws NumericError at the exponent singularity 2 b^2 iota_4 = 1 or
/// when BR changes sign on the integration path.
PhiModel lemma23_phi(std::function<double(double)> iota3,
                     std::function<double(double)> iota4,
                     std::function<double(double)> iota5,
                     std::function<double(double)> iota6,
                     std::pair<double, double> b2_range,
                     double quad_tol = 1e-11);

}  // namespace finsler

#endif
