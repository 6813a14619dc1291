// SPDX-License-Identifier: Apache-2.0

#include "finsler/metric.hpp"

#include <cmath>
#include <functional>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

/// F^2 = alpha^2 phi^2 on jet coordinates; checks (b^2, s) admissibility
/// at the value level.
Jet f2_jet(const GeneralABMetric& m, std::span<const Jet> xj,
           std::span<const Jet> yj) {
  const int n = m.dim;
  Matrix<Jet> a = m.alpha.coeffs(xj);
  std::vector<Jet> b = m.beta.coeffs(xj);

  const auto& sp = xj[0].space();
  Jet alpha2 = Jet::constant(sp, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) alpha2 += a(i, j) * yj[i] * yj[j];
  Jet beta = Jet::constant(sp, 0.0);
  for (int i = 0; i < n; ++i) beta += b[i] * yj[i];

  auto z = solve_spd<Jet>(a, b);
  Jet b2 = Jet::constant(sp, 0.0);
  for (int i = 0; i < n; ++i) b2 += b[i] * z[i];

  Jet alpha = sqrt(alpha2);
  Jet s = beta / alpha;

  if (!m.phi.in_domain(b2.value(), s.value()))
    throw DomainViolation(m.name + ": (b2=" + std::to_string(b2.value()) +
                          ", s=" + std::to_string(s.value()) +
                          ") outside the domain of " + m.phi.name);
  Jet phi = m.phi.eval(b2, s);
  if (!(phi.value() > 0.0))
    throw DomainViolation(m.name + ": phi = " + std::to_string(phi.value()) +
                          " <= 0 at (b2=" + std::to_string(b2.value()) +
                          ", s=" + std::to_string(s.value()) + ")");
  return alpha2 * phi * phi;
}

std::vector<Jet> constant_coords(std::span<const double> v,
                                 const JetSpacePtr& sp) {
  std::vector<Jet> out;
  out.reserve(v.size());
  for (double c : v) out.push_back(Jet::constant(sp, c));
  return out;
}

void check_admissible(const GeneralABMetric& m, std::span<const double> x) {
  if (m.alpha.admissible && !m.alpha.admissible(x))
    throw DomainViolation(m.name + ": point outside the admissible domain");
}

}  // namespace

ABScalars ab_scalars(const GeneralABMetric& m, std::span<const double> x,
                     std::span<const double> y) {
  check_admissible(m, x);
  PointFrame f = point_frame(m.alpha, m.beta, x);
  ABScalars r;
  double a2 = 0.0, be = 0.0;
  for (int i = 0; i < m.dim; ++i) {
    be += f.b[i] * y[i];
    for (int j = 0; j < m.dim; ++j) a2 += f.a(i, j) * y[i] * y[j];
  }
  r.alpha = std::sqrt(a2);
  r.beta = be;
  r.b2 = f.b2;
  r.s = be / r.alpha;
  return r;
}

double evaluate_F(const GeneralABMetric& m, std::span<const double> x,
                  std::span<const double> y) {
  check_admissible(m, x);
  auto sp = JetSpace::pure(0, 0);
  Jet f2 = f2_jet(m, constant_coords(x, sp), constant_coords(y, sp));
  return std::sqrt(f2.value());
}

Matrix<double> fundamental_tensor(const GeneralABMetric& m,
                                  std::span<const double> x,
                                  std::span<const double> y) {
  check_admissible(m, x);
  const int n = m.dim;
  auto sp = JetSpace::pure(n, 2);
  std::vector<Jet> yj;
  for (int i = 0; i < n; ++i) yj.push_back(Jet::variable(sp, i, y[i]));
  Jet f2 = f2_jet(m, constant_coords(x, sp), yj);
  Matrix<double> g(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      g(i, j) = 0.5 * f2.partial({i, j});
      g(j, i) = g(i, j);
    }
  try {
    cholesky(g);
  } catch (const NumericError&) {
    const auto ev = sym_eigenvalues(g);
    throw NumericError(m.name +
                       ": fundamental tensor is not positive definite "
                       "(smallest eigenvalue " +
                       std::to_string(ev.front()) + ")");
  }
  return g;
}

SprayResult spray_first_principles(const GeneralABMetric& m,
                                   std::span<const double> x,
                                   std::span<const double> y) {
  check_admissible(m, x);
  const int n = m.dim;
  // y as main directions, x as degree-1 auxiliaries: one jet supplies
  // [F^2]_{y y}, [F^2]_{x y} and [F^2]_x.
  auto sp = JetSpace::get({n, n, 2, 1});
  std::vector<Jet> yj, xj;
  for (int i = 0; i < n; ++i) yj.push_back(Jet::variable(sp, i, y[i]));
  for (int i = 0; i < n; ++i) xj.push_back(Jet::variable(sp, n + i, x[i]));
  Jet f2 = f2_jet(m, xj, yj);

  Matrix<double> g(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      g(i, j) = 0.5 * f2.partial({i, j});
      g(j, i) = g(i, j);
    }
  std::vector<double> rhs(n, 0.0);
  for (int l = 0; l < n; ++l) {
    double acc = -f2.partial({n + l});
    for (int mm = 0; mm < n; ++mm) acc += f2.partial({n + mm, l}) * y[mm];
    rhs[l] = acc;
  }
  auto sol = solve_spd<double>(g, rhs);
  SprayResult r;
  r.method = SprayMethod::FirstPrinciples;
  r.G.resize(n);
  for (int i = 0; i < n; ++i) r.G[i] = 0.25 * sol[i];
  return r;
}

SprayResult spray_eq14(const GeneralABMetric& m, std::span<const double> x,
                       std::span<const double> y) {
  check_admissible(m, x);
  const int n = m.dim;
  const BetaDecomposition d = decompose_beta(m.alpha, m.beta, x);
  const ABScalars sc = ab_scalars(m, x, y);
  const AuxQuantities q = aux_quantities(m.phi, sc.b2, sc.s);
  const std::vector<double> aG = alpha_spray(m.alpha, x, y);

  const double r00 = d.r00(y);
  const double r0 = d.r0(y);
  const double s0 = d.s0(y);
  const std::vector<double> si0 = d.si0(y);

  const double core = -2.0 * sc.alpha * q.Q * s0 + r00 +
                      2.0 * sc.alpha * sc.alpha * q.R * d.r;
  const double ycoef =
      (q.Theta * core + sc.alpha * q.Omega * (r0 + s0)) / sc.alpha;
  const double bcoef = q.Psi * core + sc.alpha * q.Pi * (r0 + s0);
  const double rscoef = sc.alpha * sc.alpha * q.R;

  SprayResult r;
  r.method = SprayMethod::Eq14;
  r.G.resize(n);
  for (int i = 0; i < n; ++i)
    r.G[i] = aG[i] + sc.alpha * q.Q * si0[i] + ycoef * y[i] +
             bcoef * d.b_up[i] - rscoef * (d.r_up[i] + d.s_up[i]);
  return r;
}

namespace {

/// Ghat^i = ^alpha G^i + (k alpha^2 / 2 b^3)(nu b^2 - (nu-mu) s^2) b^i,
/// checking only the (alpha, beta) side of the preconditions.
std::vector<double> douglas_form_ghat(const GeneralABMetric& m,
                                      const PdeParams& params, double k,
                                      std::span<const double> x,
                                      std::span<const double> y,
                                      const ABScalars& sc) {
  const int n = m.dim;
  const Condition03Fit fit = fit_condition03(m.alpha, m.beta, x);
  const double c = params.c(sc.b2);
  const double kscale = std::max(std::abs(k), 1e-8);
  if (fit.status != Condition03Status::Ok ||
      std::abs(fit.k - k) > 1e-6 * kscale ||
      std::abs(fit.c - c) > 1e-6 * (std::abs(c) + 1.0) ||
      fit.residual_norm > 1e-7 * (std::abs(fit.lambda) + std::abs(fit.tau) +
                                  1.0))
    throw DomainViolation(
        m.name + ": (alpha, beta) does not satisfy the conformal-type "
                 "condition with the given (k, c); fit k=" +
        std::to_string(fit.k) + " c=" + std::to_string(fit.c) +
        " residual=" + std::to_string(fit.residual_norm));

  const std::vector<double> aG = alpha_spray(m.alpha, x, y);
  const BetaDecomposition d = decompose_beta(m.alpha, m.beta, x);
  const double mu = params.mu(sc.b2);
  const double nu = params.nu(sc.b2);
  const double b3 = sc.b2 * std::sqrt(sc.b2);
  const double bterm = k * sc.alpha * sc.alpha / (2.0 * b3) *
                       (nu * sc.b2 - (nu - mu) * sc.s * sc.s);
  std::vector<double> ghat(n);
  for (int i = 0; i < n; ++i) ghat[i] = aG[i] + bterm * d.b_up[i];
  return ghat;
}

}  // namespace

DouglasFormSpray spray_douglas_form(const GeneralABMetric& m,
                                    const PdeParams& params, double k,
                                    std::span<const double> x,
                                    std::span<const double> y) {
  check_admissible(m, x);
  const int n = m.dim;
  const ABScalars sc = ab_scalars(m, x, y);

  const double pde = pde02_residual(m.phi, params, sc.b2, sc.s);
  if (std::abs(pde) > 1e-7)
    throw DomainViolation(m.name + ": phi does not satisfy the Douglas PDE "
                                   "with these parameters (residual " +
                          std::to_string(pde) + ")");

  DouglasFormSpray out;
  out.Ghat = douglas_form_ghat(m, params, k, x, y, sc);

  const AuxQuantities q = aux_quantities(m.phi, sc.b2, sc.s);
  const double c = params.c(sc.b2);
  const double s2 = sc.s * sc.s;
  const double ycoef =
      k * sc.alpha * (((1.0 - c) * s2 + c * sc.b2) * q.Theta + sc.b2 * q.Xi);
  out.spray.method = SprayMethod::DouglasForm;
  out.spray.G.resize(n);
  for (int i = 0; i < n; ++i) out.spray.G[i] = out.Ghat[i] + ycoef * y[i];
  return out;
}

DouglasTensorValue douglas_tensor(const GeneralABMetric& m,
                                  std::span<const double> x,
                                  std::span<const double> y) {
  check_admissible(m, x);
  const int n = m.dim;
  if (m.phi.max_jet_order < 6)
    throw Error(m.name +
                ": the Douglas pipeline needs phi jets of order 6, but " +
                m.phi.name + " supplies only order " +
                std::to_string(m.phi.max_jet_order));

  // F^2 to y-order 6 (x-degree-0 block) and y-order 5 at x-degree 1.
  auto sp_big = JetSpace::get({n, n, 6, 1});
  std::vector<Jet> yj, xj;
  for (int i = 0; i < n; ++i) yj.push_back(Jet::variable(sp_big, i, y[i]));
  for (int i = 0; i < n; ++i)
    xj.push_back(Jet::variable(sp_big, n + i, x[i]));
  const Jet f2 = f2_jet(m, xj, yj);

  auto sp6 = JetSpace::pure(n, 6);
  auto sp5 = JetSpace::pure(n, 5);
  auto sp4 = JetSpace::pure(n, 4);
  auto sp3 = JetSpace::pure(n, 3);

  const Jet f2_y = main_slice(f2, sp6);

  // g_ij(y0 + t) to order 4
  Matrix<Jet> g(n, Jet::constant(sp4, 0.0));
  for (int i = 0; i < n; ++i) {
    const Jet di = derive(f2_y, i);
    for (int j = i; j < n; ++j) {
      Jet gij = 0.5 * derive(di, j);
      g(i, j) = gij;
      g(j, i) = gij;
    }
  }

  // R_l(y0 + t) = [F^2]_{x^m y^l} (y0^m + t_m) - [F^2]_{x^l} to order 4
  std::vector<Jet> K;  // x-degree-1 slices, order 5
  K.reserve(n);
  for (int mm = 0; mm < n; ++mm) K.push_back(aux_slice(f2, mm, sp5));
  std::vector<Jet> rhs;
  rhs.reserve(n);
  for (int l = 0; l < n; ++l) {
    Jet acc = -truncate_to(K[l], sp4);
    for (int mm = 0; mm < n; ++mm)
      acc += derive(K[mm], l) * Jet::variable(sp4, mm, y[mm]);
    rhs.push_back(acc);
  }

  auto Gjet = solve_spd<Jet>(g, rhs);
  for (auto& Gi : Gjet) Gi *= 0.25;

  // T^i = G^i - (1/(n+1)) (d_m G^m) y^i, correct to order 3
  Jet H = Jet::constant(sp3, 0.0);
  for (int mm = 0; mm < n; ++mm) H += derive(Gjet[mm], mm);
  std::vector<Jet> T;
  T.reserve(n);
  for (int i = 0; i < n; ++i)
    T.push_back(truncate_to(Gjet[i], sp3) -
                (1.0 / (n + 1.0)) * H * Jet::variable(sp3, i, y[i]));

  DouglasTensorValue out;
  out.n = n;
  out.D.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  std::vector<std::uint8_t> e(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k)
        for (int l = k; l < n; ++l) {
          std::fill(e.begin(), e.end(), 0);
          e[j] += 1;
          e[k] += 1;
          e[l] += 1;
          const int idx = sp3->index_of(e);
          const double v =
              T[i].coefficient(idx) * sp3->factorial_product(idx);
          // total symmetry in (j,k,l) holds by construction
          const int js[3] = {j, k, l};
          int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                            {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
          for (auto& p : perm)
            out.at(i, js[p[0]], js[p[1]], js[p[2]]) = v;
          out.sup_norm = std::max(out.sup_norm, std::abs(v));
        }
  }
  return out;
}

DouglasTensorValue douglas_tensor_fd_oracle(const GeneralABMetric& m,
                                            std::span<const double> x,
                                            std::span<const double> y,
                                            double step) {
  const int n = m.dim;
  const double h = step;

  auto T_at = [&](std::span<const double> yy) {
    std::vector<double> G = spray_first_principles(m, x, yy).G;
    double H = 0.0;
    std::vector<double> yp(yy.begin(), yy.end());
    for (int mm = 0; mm < n; ++mm) {
      yp[mm] = yy[mm] + h;
      const double gp = spray_first_principles(m, x, yp).G[mm];
      yp[mm] = yy[mm] - h;
      const double gm = spray_first_principles(m, x, yp).G[mm];
      yp[mm] = yy[mm];
      H += (gp - gm) / (2.0 * h);
    }
    std::vector<double> T(n);
    for (int i = 0; i < n; ++i) T[i] = G[i] - H * yy[i] / (n + 1.0);
    return T;
  };

  // third mixed central difference: apply the two-point stencil in each
  // of the three directions
  std::function<std::vector<double>(std::vector<double>, int, const int*)>
      diff = [&](std::vector<double> yy, int depth,
                 const int* dirs) -> std::vector<double> {
    if (depth == 0) return T_at(yy);
    const int v = dirs[depth - 1];
    std::vector<double> yp = yy, ym = yy;
    yp[v] += h;
    ym[v] -= h;
    const auto fp = diff(yp, depth - 1, dirs);
    const auto fm = diff(ym, depth - 1, dirs);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = (fp[i] - fm[i]) / (2.0 * h);
    return out;
  };

  DouglasTensorValue out;
  out.n = n;
  out.D.assign(static_cast<std::size_t>(n) * n * n * n, 0.0);
  std::vector<double> y0(y.begin(), y.end());
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k)
      for (int l = k; l < n; ++l) {
        const int dirs[3] = {j, k, l};
        const auto v = diff(y0, 3, dirs);
        const int js[3] = {j, k, l};
        int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                          {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (int i = 0; i < n; ++i) {
          for (auto& p : perm)
            out.at(i, js[p[0]], js[p[1]], js[p[2]]) = v[i];
          out.sup_norm = std::max(out.sup_norm, std::abs(v[i]));
        }
      }
  return out;
}

double projective_deviation(const GeneralABMetric& m, const PdeParams& params,
                            double k, std::span<const double> x,
                            std::span<const double> y) {
  const int n = m.dim;
  const auto fp = spray_first_principles(m, x, y);
  // Ghat needs only the (alpha, beta) precondition; a phi violating the
  // PDE shows up as a large deviation, which is what the negative
  // controls measure.
  const ABScalars sc = ab_scalars(m, x, y);
  const auto ghat = douglas_form_ghat(m, params, k, x, y, sc);

  PointFrame f = point_frame(m.alpha, m.beta, x);
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = fp.G[i] - ghat[i];

  double wy = 0.0, yy = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      wy += f.a(i, j) * w[i] * y[j];
      yy += f.a(i, j) * y[i] * y[j];
    }
  const double t = wy / yy;
  double norm2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      norm2 += f.a(i, j) * (w[i] - t * y[i]) * (w[j] - t * y[j]);
  return std::sqrt(std::max(0.0, norm2));
}

}  // namespace finsler
