// SPDX-License-Identifier: Apache-2.0
//
// Everything about the profile function phi(b^2, s): evaluation as jets,
// the auxiliary quantities Q, Theta, Psi, R, Pi, Omega, Xi of the spray
// formula, the Douglas PDE residual, the positivity conditions, and the
// Q = iota_1 s degeneracy test.

#ifndef FINSLER_PHI_HPP
#define FINSLER_PHI_HPP

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "finsler/jet.hpp"

namespace finsler {

struct PhiModel {
  /// phi evaluated on jets of (b^2, s) living in any shared algebra.
  std::function<Jet(const Jet& b2, const Jet& s)> eval;
  /// Extra per-entry restriction on (b^2, s) beyond |s| <= b < b0.
  std::function<bool(double b2, double s)> admissible;
  double b0_sq = std::numeric_limits<double>::infinity();
  /// Highest jet order the evaluator delivers (quadrature-built models
  /// provide order 2; closed forms are unlimited).
  int max_jet_order = 1 << 20;
  std::string name;

  bool in_domain(double b2, double s) const {
    if (!(b2 > 0.0) || b2 >= b0_sq || s * s > b2) return false;
    return !admissible || admissible(b2, s);
  }
};

/// c(b^2), mu(b^2), nu(b^2) of the Douglas PDE.
struct PdeParams {
  std::function<double(double)> c, mu, nu;
};

struct PhiPartials {
  double phi, phi1, phi2, phi11, phi12, phi22;
};

/// phi and its partials to second order at a point (2-variable jet).
PhiPartials phi_partials(const PhiModel& phi, double b2, double s);

struct AuxQuantities {
  double Q, Theta, Psi, R, Pi, Omega, Xi;
  double phi, phi1, phi2, phi12, phi22;
  double den1;  // phi - s phi_2
  double den2;  // phi - s phi_2 + (b^2 - s^2) phi_22
};

/// The Q/Theta/Psi/R/Pi/Omega quantities of the spray formula plus the Xi
/// of the Douglas decomposition; throws DomainViolation naming the failed
/// positivity condition when a denominator is nonpositive.
AuxQuantities aux_quantities(const PhiModel& phi, double b2, double s);

/// Signed residual of the Douglas PDE
///   {b^3[(1-c)s^2 + c b^2] + [(nu-mu)s^2 - nu b^2](b^2-s^2)} phi_22
///     - 2 b^5 (phi_1 - s phi_12) + [(nu-mu)s^2 - nu b^2](phi - s phi_2).
double pde02_residual(const PhiModel& phi, const PdeParams& params, double b2,
                      double s);

struct PositivityPoint {
  double b2, s, cond1, cond2;
};

struct PositivityReport {
  bool pass = false;
  double min_cond1 = std::numeric_limits<double>::infinity();
  double min_cond2 = std::numeric_limits<double>::infinity();
  int checked = 0;
  std::vector<PositivityPoint> failures;
};

/// Per-point check of phi - s phi_2 > 0 and
/// phi - s phi_2 + (b^2 - s^2) phi_22 > 0 (the first is dropped when
/// dim_mode == 2).  Failures are recorded, not thrown.
PositivityReport positivity_check(const PhiModel& phi,
                                  std::span<const std::pair<double, double>>
                                      grid,
                                  int dim_mode = 3);

/// Rectangular grid helper: nb x ns points over [b2_lo, b2_hi] with
/// |s| <= frac * b.
std::vector<std::pair<double, double>> phi_grid(double b2_lo, double b2_hi,
                                                int nb, int ns,
                                                double frac = 0.95);

struct Lemma22Verdict {
  bool riemannian_type = false;
  double iota1 = 0.0;
  double iota2 = 0.0;
  double deviation = 0.0;
};

/// Detects the degenerate case Q = iota_1(b^2) s, which forces
/// phi = iota_2 sqrt(1 + iota_1 s^2) (Riemannian type).
Lemma22Verdict lemma22_reduction(const PhiModel& phi, double b2,
                                 std::span<const double> s_samples,
                                 double tol = 1e-10);

/// phi + amplitude * s^3; breaks the Douglas PDE generically while keeping
/// positivity for small amplitudes (the negative-control fixture).
PhiModel with_cubic_perturbation(const PhiModel& base, double amplitude);

/// Pointwise sum (used by linearity property tests).
PhiModel phi_sum(const PhiModel& a, const PhiModel& b);

}  // namespace finsler

#endif
