// SPDX-License-Identifier: Apache-2.0

#include "finsler/riemann.hpp"

#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

std::vector<Jet> seed_coordinates(std::span<const double> x,
                                  const JetSpacePtr& sp) {
  std::vector<Jet> xj;
  xj.reserve(x.size());
  for (std::size_t v = 0; v < x.size(); ++v)
    xj.push_back(Jet::variable(sp, static_cast<int>(v), x[v]));
  return xj;
}

}  // namespace

PointFrame point_frame(const RiemannianMetric& metric, const OneForm& form,
                       std::span<const double> x) {
  const int n = metric.dim;
  auto sp = JetSpace::pure(n, 1);
  auto xj = seed_coordinates(x, sp);
  Matrix<Jet> aj = metric.coeffs(xj);

  PointFrame f;
  f.n = n;
  f.a = Matrix<double>(n, 0.0);
  f.da.assign(n, Matrix<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      f.a(i, j) = aj(i, j).value();
      for (int l = 0; l < n; ++l) f.da[l](i, j) = aj(i, j).first_partial(l);
    }

  Matrix<double> L = cholesky(f.a);
  f.a_inv = Matrix<double>(n, 0.0);
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e.assign(n, 0.0);
    e[j] = 1.0;
    auto col = cholesky_solve<double>(L, e);
    for (int i = 0; i < n; ++i) f.a_inv(i, j) = col[i];
  }

  if (form.coeffs) {
    auto bj = form.coeffs(xj);
    f.b.resize(n);
    f.db = Matrix<double>(n, 0.0);
    for (int i = 0; i < n; ++i) {
      f.b[i] = bj[i].value();
      for (int j = 0; j < n; ++j) f.db(i, j) = bj[i].first_partial(j);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) f.b2 += f.a_inv(i, j) * f.b[i] * f.b[j];
  }
  return f;
}

PointFrame point_frame(const RiemannianMetric& metric,
                       std::span<const double> x) {
  return point_frame(metric, OneForm{}, x);
}

Christoffel christoffel(const RiemannianMetric& metric,
                        std::span<const double> x) {
  const int n = metric.dim;
  if (metric.admissible && !metric.admissible(x))
    throw DomainViolation("point outside the admissible domain of " +
                          metric.name);
  PointFrame f = point_frame(metric, x);
  Christoffel out;
  out.n = n;
  out.g.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += 0.5 * f.a_inv(i, l) *
                 (f.da[j](l, k) + f.da[k](j, l) - f.da[l](j, k));
        out.at(i, j, k) = acc;
        out.at(i, k, j) = acc;
      }
  return out;
}

std::vector<double> alpha_spray(const RiemannianMetric& metric,
                                std::span<const double> x,
                                std::span<const double> y) {
  const int n = metric.dim;
  Christoffel g = christoffel(metric, x);
  std::vector<double> G(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) acc += g.at(i, j, k) * y[j] * y[k];
    G[i] = 0.5 * acc;
  }
  return G;
}

Matrix<double> covariant_derivative(const RiemannianMetric& metric,
                                    const OneForm& form,
                                    std::span<const double> x) {
  const int n = metric.dim;
  PointFrame f = point_frame(metric, form, x);
  Christoffel g = christoffel(metric, x);
  Matrix<double> cov(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = f.db(i, j);
      for (int l = 0; l < n; ++l) acc -= f.b[l] * g.at(l, i, j);
      cov(i, j) = acc;
    }
  return cov;
}

double BetaDecomposition::r00(std::span<const double> y) const {
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc += r_ij(i, j) * y[i] * y[j];
  return acc;
}

double BetaDecomposition::r0(std::span<const double> y) const {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += r_i[i] * y[i];
  return acc;
}

double BetaDecomposition::s0(std::span<const double> y) const {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += s_i[i] * y[i];
  return acc;
}

std::vector<double> BetaDecomposition::si0(std::span<const double> y) const {
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        acc += a_inv_flat[static_cast<std::size_t>(i) * n + j] * s_ij(j, k) *
               y[k];
    out[i] = acc;
  }
  return out;
}

BetaDecomposition decompose_beta(const RiemannianMetric& metric,
                                 const OneForm& form,
                                 std::span<const double> x) {
  const int n = metric.dim;
  PointFrame f = point_frame(metric, form, x);
  Matrix<double> cov = covariant_derivative(metric, form, x);

  BetaDecomposition d;
  d.n = n;
  d.r_ij = Matrix<double>(n, 0.0);
  d.s_ij = Matrix<double>(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      d.r_ij(i, j) = 0.5 * (cov(i, j) + cov(j, i));
      d.s_ij(i, j) = 0.5 * (cov(i, j) - cov(j, i));
    }
  d.b_i = f.b;
  d.b2 = f.b2;
  d.b_up.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d.b_up[i] += f.a_inv(i, j) * f.b[j];
  d.r_i.assign(n, 0.0);
  d.s_i.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      d.r_i[i] += d.b_up[j] * d.r_ij(j, i);
      d.s_i[i] += d.b_up[j] * d.s_ij(j, i);
    }
  d.r_up.assign(n, 0.0);
  d.s_up.assign(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      d.r_up[i] += f.a_inv(i, j) * d.r_i[j];
      d.s_up[i] += f.a_inv(i, j) * d.s_i[j];
    }
  d.r = 0.0;
  for (int i = 0; i < n; ++i) d.r += d.b_up[i] * d.r_i[i];
  d.a_inv_flat.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      d.a_inv_flat[static_cast<std::size_t>(i) * n + j] = f.a_inv(i, j);
  return d;
}

Condition03Fit fit_condition03(const RiemannianMetric& metric,
                               const OneForm& form,
                               std::span<const double> x) {
  const int n = metric.dim;
  PointFrame f = point_frame(metric, form, x);
  if (!(f.b2 > 0.0))
    throw DomainViolation("fit_condition03 requires b^2 > 0, got " +
                          std::to_string(f.b2));
  Matrix<double> cov = covariant_derivative(metric, form, x);

  Condition03Fit fit;
  fit.b2 = f.b2;

  double cov_norm = 0.0, closed = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cov_norm += cov(i, j) * cov(i, j);
      const double s = 0.5 * (cov(i, j) - cov(j, i));
      closed += s * s;
    }
  cov_norm = std::sqrt(cov_norm);
  fit.closedness_norm = std::sqrt(closed);

  if (cov_norm < 1e-12) {
    fit.status = Condition03Status::Parallel;
    return fit;
  }

  // Least squares over the n(n+1)/2 independent symmetric entries; the
  // condition is linear in (lambda, tau) = (k c b^2, k(1-c)) even though
  // (k, c) enter nonlinearly.
  double g11 = 0.0, g12 = 0.0, g22 = 0.0, h1 = 0.0, h2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double u = 0.5 * (cov(i, j) + cov(j, i));
      const double v1 = f.a(i, j);
      const double v2 = f.b[i] * f.b[j];
      g11 += v1 * v1;
      g12 += v1 * v2;
      g22 += v2 * v2;
      h1 += v1 * u;
      h2 += v2 * u;
    }
  const double tr = g11 + g22;
  const double det = g11 * g22 - g12 * g12;
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  const double eig_min = 0.5 * (tr - disc);
  const double eig_max = 0.5 * (tr + disc);
  if (!(eig_min > 0.0) || eig_max / eig_min > 1e12)
    throw NumericError(
        "condition-(03) fit is degenerate: a_ij and b_i b_j are nearly "
        "parallel as symmetric tensors");
  fit.lambda = (g22 * h1 - g12 * h2) / det;
  fit.tau = (g11 * h2 - g12 * h1) / det;

  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = 0.5 * (cov(i, j) + cov(j, i));
      const double m = u - fit.lambda * f.a(i, j) - fit.tau * f.b[i] * f.b[j];
      res += m * m;
    }
  fit.residual_norm = std::sqrt(res);

  fit.k = fit.lambda / f.b2 + fit.tau;
  if (std::abs(fit.k) < 1e-12 * (std::abs(fit.lambda) / f.b2 + 1.0)) {
    fit.status = Condition03Status::Parallel;
    fit.k = 0.0;
    return fit;
  }
  fit.c = fit.lambda / (f.b2 * fit.k);
  return fit;
}

}  // namespace finsler
