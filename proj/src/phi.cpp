// SPDX-License-Identifier: Apache-2.0

#include "finsler/phi.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

PhiPartials phi_partials(const PhiModel& phi, double b2, double s) {
  auto sp = JetSpace::pure(2, 2);
  Jet b2j = Jet::variable(sp, 0, b2);
  Jet sj = Jet::variable(sp, 1, s);
  Jet v = phi.eval(b2j, sj);
  PhiPartials p;
  p.phi = v.value();
  p.phi1 = v.first_partial(0);
  p.phi2 = v.first_partial(1);
  p.phi11 = v.partial({0, 0});
  p.phi12 = v.partial({0, 1});
  p.phi22 = v.partial({1, 1});
  return p;
}

AuxQuantities aux_quantities(const PhiModel& phi, double b2, double s) {
  const PhiPartials p = phi_partials(phi, b2, s);
  AuxQuantities q;
  q.phi = p.phi;
  q.phi1 = p.phi1;
  q.phi2 = p.phi2;
  q.phi12 = p.phi12;
  q.phi22 = p.phi22;
  q.den1 = p.phi - s * p.phi2;
  q.den2 = q.den1 + (b2 - s * s) * p.phi22;
  if (!(q.den1 > 0.0))
    throw DomainViolation("positivity failed: phi - s phi_2 = " +
                          std::to_string(q.den1) + " <= 0 at (b2=" +
                          std::to_string(b2) + ", s=" + std::to_string(s) +
                          ")");
  if (!(q.den2 > 0.0))
    throw DomainViolation(
        "positivity failed: phi - s phi_2 + (b2-s2) phi_22 = " +
        std::to_string(q.den2) + " <= 0 at (b2=" + std::to_string(b2) +
        ", s=" + std::to_string(s) + ")");
  q.Q = p.phi2 / q.den1;
  q.Theta = (q.den1 * p.phi2 - s * p.phi * p.phi22) / (2.0 * p.phi * q.den2);
  q.Psi = p.phi22 / (2.0 * q.den2);
  q.R = p.phi1 / q.den1;
  q.Pi = (q.den1 * p.phi12 - s * p.phi1 * p.phi22) / (q.den1 * q.den2);
  q.Omega = 2.0 * p.phi1 / p.phi -
            (s * p.phi + (b2 - s * s) * p.phi2) / p.phi * q.Pi;
  q.Xi = (b2 * (p.phi1 - s * p.phi12) * p.phi2 +
          s * (b2 - s * s) * p.phi1 * p.phi22 +
          s * q.den1 * (2.0 * p.phi1 - s * p.phi12)) /
         (p.phi * q.den2);
  return q;
}

double pde02_residual(const PhiModel& phi, const PdeParams& params, double b2,
                      double s) {
  const PhiPartials p = phi_partials(phi, b2, s);
  const double b = std::sqrt(b2);
  const double b3 = b2 * b;
  const double b5 = b2 * b3;
  const double c = params.c(b2);
  const double mu = params.mu(b2);
  const double nu = params.nu(b2);
  const double A = (nu - mu) * s * s - nu * b2;
  return (b3 * ((1.0 - c) * s * s + c * b2) + A * (b2 - s * s)) * p.phi22 -
         2.0 * b5 * (p.phi1 - s * p.phi12) + A * (p.phi - s * p.phi2);
}

PositivityReport positivity_check(const PhiModel& phi,
                                  std::span<const std::pair<double, double>>
                                      grid,
                                  int dim_mode) {
  PositivityReport rep;
  for (const auto& [b2, s] : grid) {
    const PhiPartials p = phi_partials(phi, b2, s);
    const double c1 = p.phi - s * p.phi2;
    const double c2 = c1 + (b2 - s * s) * p.phi22;
    rep.min_cond1 = std::min(rep.min_cond1, c1);
    rep.min_cond2 = std::min(rep.min_cond2, c2);
    const bool ok = (dim_mode == 2 ? true : c1 > 0.0) && c2 > 0.0;
    if (!ok) rep.failures.push_back({b2, s, c1, c2});
    ++rep.checked;
  }
  rep.pass = rep.failures.empty();
  return rep;
}

std::vector<std::pair<double, double>> phi_grid(double b2_lo, double b2_hi,
                                                int nb, int ns, double frac) {
  std::vector<std::pair<double, double>> g;
  g.reserve(static_cast<std::size_t>(nb) * ns);
  for (int i = 0; i < nb; ++i) {
    const double b2 =
        nb == 1 ? b2_lo : b2_lo + (b2_hi - b2_lo) * i / (nb - 1.0);
    const double smax = frac * std::sqrt(b2);
    for (int j = 0; j < ns; ++j) {
      const double s = ns == 1 ? 0.0 : -smax + 2.0 * smax * j / (ns - 1.0);
      g.emplace_back(b2, s);
    }
  }
  return g;
}

Lemma22Verdict lemma22_reduction(const PhiModel& phi, double b2,
                                 std::span<const double> s_samples,
                                 double tol) {
  Lemma22Verdict v;
  double sum = 0.0;
  int used = 0;
  std::vector<double> ratios;
  for (double s : s_samples) {
    if (std::abs(s) < 1e-6) continue;  // Q/s is 0/0 at the origin
    const auto q = aux_quantities(phi, b2, s);
    ratios.push_back(q.Q / s);
    sum += q.Q / s;
    ++used;
  }
  if (used < 2) throw Error("lemma22_reduction needs at least two s != 0");
  v.iota1 = sum / used;
  v.deviation = 0.0;
  for (double r : ratios)
    v.deviation = std::max(v.deviation, std::abs(r - v.iota1));
  v.riemannian_type = v.deviation < tol;
  if (v.riemannian_type) {
    // iota_2 from phi = iota_2 sqrt(1 + iota_1 s^2) at the sample points
    double acc = 0.0;
    int cnt = 0;
    for (double s : s_samples) {
      const auto p = phi_partials(phi, b2, s);
      const double root = 1.0 + v.iota1 * s * s;
      if (root > 0.0) {
        acc += p.phi / std::sqrt(root);
        ++cnt;
      }
    }
    if (cnt > 0) v.iota2 = acc / cnt;
  }
  return v;
}

PhiModel with_cubic_perturbation(const PhiModel& base, double amplitude) {
  PhiModel p = base;
  auto inner = base.eval;
  p.eval = [inner, amplitude](const Jet& b2, const Jet& s) {
    return inner(b2, s) + amplitude * s * s * s;
  };
  p.name = base.name + "+" + std::to_string(amplitude) + "s^3";
  return p;
}

PhiModel phi_sum(const PhiModel& a, const PhiModel& b) {
  PhiModel p = a;
  auto ea = a.eval;
  auto eb = b.eval;
  p.eval = [ea, eb](const Jet& b2, const Jet& s) {
    return ea(b2, s) + eb(b2, s);
  };
  p.max_jet_order = std::min(a.max_jet_order, b.max_jet_order);
  p.b0_sq = std::min(a.b0_sq, b.b0_sq);
  p.name = a.name + "+" + b.name;
  return p;
}

}  // namespace finsler
