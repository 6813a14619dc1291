// SPDX-License-Identifier: Apache-2.0
//
// The Riemannian layer: metric coefficients a_ij(x) and 1-form
// coefficients b_i(x) as jet evaluators, Christoffel symbols, the
// Riemannian spray, the covariant derivative b_{i|j}, its r/s split, and
// the two-parameter fit of the conformal-type condition
// b_{i|j} = k c b^2 a_ij + k (1-c) b_i b_j.

#ifndef FINSLER_RIEMANN_HPP
#define FINSLER_RIEMANN_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "finsler/jet.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

/// a_ij(x), evaluated in whatever jet algebra the coordinates live in;
/// catalog entries supply closed forms so any truncation order works.
struct RiemannianMetric {
  int dim = 0;
  std::function<Matrix<Jet>(std::span<const Jet>)> coeffs;
  std::function<bool(std::span<const double>)> admissible;
  std::string name;
};

struct OneForm {
  int dim = 0;
  std::function<std::vector<Jet>(std::span<const Jet>)> coeffs;
  std::string name;
};

/// gamma^i_{jk}, stored flat; symmetric in (j, k).
struct Christoffel {
  int n = 0;
  std::vector<double> g;

  double& at(int i, int j, int k) { return g[(i * n + j) * n + k]; }
  double at(int i, int j, int k) const { return g[(i * n + j) * n + k]; }
};

/// Metric and 1-form values plus first spatial derivatives at a point.
struct PointFrame {
  int n = 0;
  Matrix<double> a;                    // a_ij
  Matrix<double> a_inv;                // a^ij
  std::vector<Matrix<double>> da;      // da[l](i,j) = d_l a_ij
  std::vector<double> b;               // b_i
  Matrix<double> db;                   // db(i,j) = d_j b_i
  double b2 = 0.0;                     // a^{ij} b_i b_j
};

PointFrame point_frame(const RiemannianMetric& metric, const OneForm& form,
                       std::span<const double> x);
/// Metric-only variant (the 1-form slots stay empty).
PointFrame point_frame(const RiemannianMetric& metric,
                       std::span<const double> x);

Christoffel christoffel(const RiemannianMetric& metric,
                        std::span<const double> x);

/// ^alpha G^i = 1/2 gamma^i_{jk} y^j y^k.
std::vector<double> alpha_spray(const RiemannianMetric& metric,
                                std::span<const double> x,
                                std::span<const double> y);

/// b_{i|j} = d_j b_i - b_l gamma^l_{ij}.
Matrix<double> covariant_derivative(const RiemannianMetric& metric,
                                    const OneForm& form,
                                    std::span<const double> x);

struct BetaDecomposition {
  int n = 0;
  Matrix<double> r_ij;             // symmetric part
  Matrix<double> s_ij;             // antisymmetric part
  std::vector<double> r_i, s_i;    // b^j r_ji, b^j s_ji
  std::vector<double> r_up, s_up;  // raised with a^{ij}
  std::vector<double> b_i, b_up;
  std::vector<double> a_inv_flat;  // a^{ij}, for the s^i_0 contraction
  double b2 = 0.0;
  double r = 0.0;  // b^i r_i

  double r00(std::span<const double> y) const;
  double r0(std::span<const double> y) const;
  double s0(std::span<const double> y) const;
  std::vector<double> si0(std::span<const double> y) const;  // s^i_0
};

BetaDecomposition decompose_beta(const RiemannianMetric& metric,
                                 const OneForm& form,
                                 std::span<const double> x);

enum class Condition03Status { Ok, Parallel };

struct Condition03Fit {
  Condition03Status status = Condition03Status::Ok;
  double k = 0.0;
  double c = 0.0;
  double lambda = 0.0;  // k c b^2
  double tau = 0.0;     // k (1-c)
  double residual_norm = 0.0;
  double closedness_norm = 0.0;
  double b2 = 0.0;
};

/// Least squares for (lambda, tau) in b_(i|j) ~ lambda a_ij + tau b_i b_j
/// over the upper-triangle entries, then k = lambda/b^2 + tau and
/// c = lambda/(b^2 k).  A parallel form (b_{i|j} ~ 0) is a distinguished
/// outcome, not a fit.
Condition03Fit fit_condition03(const RiemannianMetric& metric,
                               const OneForm& form,
                               std::span<const double> x);

}  // namespace finsler

#endif
