// SPDX-License-Identifier: Apache-2.0
//
// The concrete constructions: the profile functions of the solution
// catalog, the (alpha, beta) pairs built on the constant-curvature and
// conformally flat metrics, the spherically symmetric specialization, and
// the id-based registry the CLI selects from.

#ifndef FINSLER_CATALOG_HPP
#define FINSLER_CATALOG_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "finsler/metric.hpp"
#include "finsler/phi.hpp"
#include "finsler/riemann.hpp"

namespace finsler::catalog {

/// a_ij = [(1+kappa|x|^2) delta_ij - kappa x_i x_j]/(1+kappa|x|^2)^2,
/// the projectively flat metric of constant sectional curvature kappa.
RiemannianMetric constant_curvature_alpha(double kappa, int dim);

struct AlphaBetaEntry {
  std::string id;
  int dim = 3;
  RiemannianMetric alpha;
  OneForm beta;
  /// Closed-form expectations (null when not applicable).
  std::function<double(std::span<const double>)> expected_k;
  std::function<double(std::span<const double>)> expected_c;
  /// c as a function of b^2 when the entry's condition-(03) c is one;
  /// null otherwise (drives the Douglas pairing rule).
  std::function<double(double)> c_of_b2;
  bool beta_parallel = false;
  double x_radius_lo = 0.05, x_radius_hi = 0.9;
  nlohmann::json params;
};

struct PhiEntry {
  std::string id;
  PhiModel phi;
  PdeParams params;
  double b2_lo = 0.05, b2_hi = 0.81;  // declared verification range
  std::function<double(double)> c_of_b2;
  bool matches_any_c = false;  // phi == 1 (Riemannian regardless of beta)
  bool perturbed = false;
  nlohmann::json params_json;
};

/// beta of the constant-curvature alpha, built through the conformal
/// tilde form scaled by 1/rho; b^2 = btilde^2 - delta2 closes the
/// implicit definition.
AlphaBetaEntry example71(double kappa, double delta1, double delta2,
                         std::vector<double> a, int dim);
AlphaBetaEntry example72(double eps, int dim);
AlphaBetaEntry example73(int dim);
/// Euclidean alpha with a constant 1-form (the parallel fixture).
AlphaBetaEntry flat_parallel(std::vector<double> b_const, int dim);
/// alpha = |y|, beta = <x,y> (the spherically symmetric data).
AlphaBetaEntry spherical_data(int dim);

PhiEntry phi_one(int dim);
PhiEntry phi_ex61(double h, int dim);
PhiEntry phi_ex62(double h, int dim);
PhiEntry phi_ex63(double c, double h, int dim);
PhiEntry phi_ex64(double h, int dim);
PhiEntry phi_lem22(double iota1, double iota2, int dim);

/// Registry by id.  AlphaBeta ids: ex71, ex71d20, ex72, ex73, flat, sph.
/// Phi ids: one, ex61, ex62, ex63c0, ex63c1, ex64, lem22; any phi id may
/// carry a ".perturbed" suffix (adds 0.1 s^3).
AlphaBetaEntry make_alphabeta(const std::string& id, int dim);
PhiEntry make_phi(const std::string& id, int dim);
std::vector<std::string> alphabeta_ids();
std::vector<std::string> phi_ids();
bool is_alphabeta_id(const std::string& id);
bool is_phi_id(const std::string& id);

/// Default Douglas partner used when a selector names bare "perturbed".
std::string default_phi_for(const std::string& ab_id);

nlohmann::json alphabeta_to_json(const AlphaBetaEntry& e);
nlohmann::json phi_to_json(const PhiEntry& e);
AlphaBetaEntry alphabeta_from_json(const nlohmann::json& j, int dim);
/// Also accepts {"id":"generator", ...} specs (Theorem 1.2 quadrature
/// profiles with named Phi / c / mu / nu choices).
PhiEntry phi_from_json(const nlohmann::json& j, int dim);

struct MetricSelection {
  std::string id;
  std::optional<AlphaBetaEntry> ab;
  std::optional<PhiEntry> ph;
  bool expected_douglas = false;
  bool negative_control = false;
};

/// "catalog:ex72+ex63c0", "catalog:ex61", "ex72+perturbed", ...
/// Order of the two components is free; "perturbed" alone resolves to the
/// default partner of the alpha-beta side, perturbed.
MetricSelection resolve_selector(const std::string& selector, int dim);
MetricSelection selection_from_json(const nlohmann::json& j, int dim);

GeneralABMetric assemble(const AlphaBetaEntry& ab, const PhiEntry& ph);
/// Corollary specialization: F = |y| phi(|x|^2, <x,y>/|y|).
GeneralABMetric spherically_symmetric(const PhiModel& phi, int dim);

/// The (f, eta) -> (c, mu, nu) dictionary of the spherically symmetric
/// PDE: c = 1, nu = eta b^3, mu = eta b^3 + f b^5 (so that the
/// spherically symmetric residual equals -residual_02 / b^5).
PdeParams corollary_params(std::function<double(double)> f,
                           std::function<double(double)> eta);

/// [(eta + f s^2)(b^2-s^2) - 1] phi_22 + 2(phi_1 - s phi_12)
///   + (eta + f s^2)(phi - s phi_2).
double pde02cor_residual(const PhiModel& phi,
                         const std::function<double(double)>& f,
                         const std::function<double(double)>& eta, double b2,
                         double s);

}  // namespace finsler::catalog

#endif
