// SPDX-License-Identifier: Apache-2.0

#include "finsler/generator.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

double default_s_anchor(double b2) { return 0.5 * std::sqrt(b2); }

/// Per-b^2 quantities of the zeta formula, computed once per query.
struct ZetaBlock {
  double E;   // exp(int ((1-c) b + mu)/b^3 db^2), anchored
  double I;   // int (nu-mu)/b^5 * E db^2, anchored
  double xi;  // exp(int (1-c)/(2 b^2) db^2), anchored
};

ZetaBlock zeta_block(const GeneratorSpec& spec, double b2) {
  const auto& c = spec.params.c;
  const auto& mu = spec.params.mu;
  const auto& nu = spec.params.nu;
  auto inner = [&](double u) {
    return ((1.0 - c(u)) * std::sqrt(u) + mu(u)) / (u * std::sqrt(u));
  };
  auto E_at = [&](double u) {
    return std::exp(integrate(inner, spec.b2_anchor, u, spec.quad_tol));
  };
  ZetaBlock z;
  z.E = E_at(b2);
  z.I = integrate(
      [&](double u) { return (nu(u) - mu(u)) / (u * u * std::sqrt(u)) * E_at(u); },
      spec.b2_anchor, b2, spec.quad_tol);
  z.xi = std::exp(integrate([&](double u) { return (1.0 - c(u)) / (2.0 * u); },
                            spec.b2_anchor, b2, spec.quad_tol));
  return z;
}

double zeta_from_block(const ZetaBlock& z, double b2, double s) {
  const double w = b2 - s * s;
  const double den = z.E + w * z.I;
  // near-total cancellation marks the excluded chi = 0 branch
  if (std::abs(den) < 1e-9 * (std::abs(z.E) + std::abs(w * z.I)))
    throw NumericError("zeta denominator vanished at (b2=" +
                       std::to_string(b2) + ", s=" + std::to_string(s) + ")");
  return w / den;
}

/// Shared skeleton of quadrature-built profiles:
///   phi(b2, s) = s * (offset(b2) - int_{s0}^{s} varphi(b2, t)/t^2 dt)
/// with varphi = phi - s phi_2 available in closed form.
struct QuadraturePhi {
  // per-b2 state handed to the s-dependent closures
  using State = std::shared_ptr<const void>;
  std::function<State(double b2)> prepare;
  std::function<double(const State&, double b2, double s)> varphi;
  std::function<double(const State&, double b2, double s)> dvarphi_ds;
  std::function<double(double)> offset;
  std::function<double(double)> s0;
  double quad_tol = 1e-11;
  std::string name;

  struct Block {
    double value, phi2, phi22;
  };

  Block block(double b2, double s) const {
    if (!(s > 0.0))
      throw DomainViolation(
          name + " is quadrature-built on the s > 0 branch; got s = " +
          std::to_string(s));
    if (!(s * s < b2))
      throw DomainViolation(name + " needs |s| < b; got (b2=" +
                            std::to_string(b2) + ", s=" + std::to_string(s) +
                            ")");
    const State st = prepare(b2);
    const double anchor = s0(b2);
    const double integral = integrate(
        [&](double t) { return varphi(st, b2, t) / (t * t); }, anchor, s,
        quad_tol);
    Block bl;
    const double vph = varphi(st, b2, s);
    bl.value = s * (offset(b2) - integral);
    bl.phi2 = (bl.value - vph) / s;
    bl.phi22 = -dvarphi_ds(st, b2, s) / s;
    return bl;
  }

  PhiPartials partials(double b2, double s) const {
    const double h = std::max(1e-5, 1e-4 * b2);
    const Block c0 = block(b2, s);
    const Block cp = block(b2 + h, s), cm = block(b2 - h, s);
    const Block hp = block(b2 + 0.5 * h, s), hm = block(b2 - 0.5 * h, s);
    auto richardson = [&](double fp, double fm, double gp, double gm) {
      const double d1 = (fp - fm) / (2.0 * h);
      const double d2 = (gp - gm) / h;
      return (4.0 * d2 - d1) / 3.0;
    };
    PhiPartials p;
    p.phi = c0.value;
    p.phi2 = c0.phi2;
    p.phi22 = c0.phi22;
    p.phi1 = richardson(cp.value, cm.value, hp.value, hm.value);
    p.phi12 = richardson(cp.phi2, cm.phi2, hp.phi2, hm.phi2);
    // phi11 is not consumed by any operation; a wide-step estimate keeps
    // the order-2 jet honest without fighting quadrature noise.
    const double hw = 0.02;
    const Block wp = block(b2 + hw, s), wm = block(b2 - hw, s);
    p.phi11 = (wp.value - 2.0 * c0.value + wm.value) / (hw * hw);
    return p;
  }

  Jet eval(const Jet& b2j, const Jet& sj) const {
    if (b2j.space()->config().total_order > 2)
      throw Error(name +
                  " supplies jets up to order 2; requested order " +
                  std::to_string(b2j.space()->config().total_order));
    const PhiPartials p = partials(b2j.value(), sj.value());
    const Jet db = b2j - b2j.value();
    const Jet ds = sj - sj.value();
    return p.phi + p.phi1 * db + p.phi2 * ds + 0.5 * p.phi11 * db * db +
           p.phi12 * db * ds + 0.5 * p.phi22 * ds * ds;
  }
};

PhiModel wrap_quadrature_phi(std::shared_ptr<QuadraturePhi> impl,
                             std::pair<double, double> b2_range) {
  PhiModel m;
  m.eval = [impl](const Jet& b2, const Jet& s) { return impl->eval(b2, s); };
  const double lo = b2_range.first;
  m.admissible = [lo](double b2, double s) { return b2 >= lo && s > 0.0; };
  m.b0_sq = b2_range.second;
  m.max_jet_order = 2;
  m.name = impl->name;
  return m;
}

}  // namespace

double zeta(const GeneratorSpec& spec, double b2, double s) {
  return zeta_from_block(zeta_block(spec, b2), b2, s);
}

double xi_factor(const GeneratorSpec& spec, double b2) {
  return zeta_block(spec, b2).xi;
}

double generator_varphi(const GeneratorSpec& spec, double b2, double s) {
  const ZetaBlock z = zeta_block(spec, b2);
  const double w = b2 - s * s;
  return z.xi * spec.Phi(zeta_from_block(z, b2, s)) / std::sqrt(w);
}

namespace {

std::shared_ptr<QuadraturePhi> make_generator_impl(const GeneratorSpec& spec) {
  auto impl = std::make_shared<QuadraturePhi>();
  impl->name = "generator-phi";
  impl->quad_tol = spec.quad_tol;
  impl->offset = spec.h ? spec.h : [](double) { return 0.0; };
  impl->s0 = spec.s_anchor ? spec.s_anchor
                           : std::function<double(double)>(default_s_anchor);
  const GeneratorSpec s = spec;  // value copy keeps the lambdas self-contained
  impl->prepare = [s](double b2) -> QuadraturePhi::State {
    return std::make_shared<ZetaBlock>(zeta_block(s, b2));
  };
  impl->varphi = [s](const QuadraturePhi::State& st, double b2, double t) {
    const auto& z = *static_cast<const ZetaBlock*>(st.get());
    return z.xi * s.Phi(zeta_from_block(z, b2, t)) / std::sqrt(b2 - t * t);
  };
  impl->dvarphi_ds = [s](const QuadraturePhi::State& st, double b2,
                         double t) {
    const auto& z = *static_cast<const ZetaBlock*>(st.get());
    const double w = b2 - t * t;
    const double den = z.E + w * z.I;
    const double zeta_v = w / den;
    const double zeta_s = -2.0 * t * z.E / (den * den);
    const double root = std::sqrt(w);
    return z.xi * (s.Phi_prime(zeta_v) * zeta_s / root +
                   s.Phi(zeta_v) * t / (w * root));
  };
  return impl;
}

}  // namespace

double generator_phi_value(const GeneratorSpec& spec, double b2, double s) {
  auto impl = make_generator_impl(spec);
  return impl->block(b2, s).value;
}

PhiModel phi_from_generator(const GeneratorSpec& spec) {
  if (!spec.Phi || !spec.Phi_prime)
    throw ConfigError("generator spec needs Phi and Phi'");
  auto impl = make_generator_impl(spec);

  // Positivity gate (the metric-existence conditions on Phi).
  const auto [lo, hi] = spec.b2_range;
  for (int i = 0; i <= 7; ++i) {
    const double b2 = lo + (hi - lo) * i / 7.0;
    const ZetaBlock z = zeta_block(spec, b2);
    const double b = std::sqrt(b2);
    for (int j = 1; j <= 7; ++j) {
      const double s = 0.95 * b * j / 7.0;
      const double root = std::sqrt(b2 - s * s);
      const double zv = zeta_from_block(z, b2, s);
      const bool first = spec.Phi(zv) / root > 0.0;
      const bool second = spec.Phi_prime(zv) * root > 0.0;
      const bool ok = spec.dim_mode == 2 ? second : (first && second);
      if (!ok)
        throw DomainViolation(
            "generator positivity failed at (b2=" + std::to_string(b2) +
            ", s=" + std::to_string(s) + "): Phi/sqrt = " +
            std::to_string(spec.Phi(zv) / root) + ", Phi' sqrt = " +
            std::to_string(spec.Phi_prime(zv) * root));
    }
  }
  return wrap_quadrature_phi(impl, spec.b2_range);
}

PhiModel lemma23_phi(std::function<double(double)> iota3,
                     std::function<double(double)> iota4,
                     std::function<double(double)> iota5,
                     std::function<double(double)> iota6,
                     std::pair<double, double> b2_range, double quad_tol) {
  struct L23State {
    double i3, i4, i5, anchor;
  };
  auto impl = std::make_shared<QuadraturePhi>();
  impl->name = "lemma23-phi";
  impl->quad_tol = quad_tol;
  impl->offset = std::move(iota6);
  impl->s0 = [](double b2) { return default_s_anchor(b2); };

  auto bracket = [](const L23State& st, double b2, double t) {
    return 2.0 * (st.i4 - st.i3) * t * t + 2.0 * st.i3 * b2 - 1.0;
  };
  auto logderiv = [bracket](const L23State& st, double b2, double t) {
    return 2.0 * t * ((st.i4 - st.i3) * t * t + st.i3 * b2) /
           ((b2 - t * t) * bracket(st, b2, t));
  };

  impl->prepare = [iota3 = std::move(iota3), iota4 = std::move(iota4),
                   iota5 = std::move(iota5),
                   impl_weak = std::weak_ptr<QuadraturePhi>()](double b2)
      -> QuadraturePhi::State {
    auto st = std::make_shared<L23State>();
    st->i3 = iota3(b2);
    st->i4 = iota4(b2);
    st->i5 = iota5(b2);
    st->anchor = default_s_anchor(b2);
    if (std::abs(2.0 * b2 * st->i4 - 1.0) < 1e-10)
      throw NumericError("lemma 2.3 exponent singularity: 2 b^2 iota_4 = 1 "
                         "at b2 = " +
                         std::to_string(b2));
    return st;
  };
  impl->varphi = [logderiv, bracket, quad_tol](
                     const QuadraturePhi::State& stv, double b2, double t) {
    const auto& st = *static_cast<const L23State*>(stv.get());
    // Guard against a bracket sign change across the integration path.
    const double lo = std::min(st.anchor, t), hi = std::max(st.anchor, t);
    for (int i = 0; i <= 4; ++i) {
      const double u = lo + (hi - lo) * i / 4.0;
      if (bracket(st, b2, u) * bracket(st, b2, st.anchor) <= 0.0)
        throw NumericError(
            "lemma 2.3 bracket changes sign on the integration path");
    }
    const double expo = integrate(
        [&](double u) { return logderiv(st, b2, u); }, st.anchor, t,
        quad_tol);
    return st.i5 * std::exp(expo);
  };
  impl->dvarphi_ds = [logderiv, vph = impl->varphi](
                         const QuadraturePhi::State& stv, double b2,
                         double t) {
    const auto& st = *static_cast<const L23State*>(stv.get());
    return vph(stv, b2, t) * logderiv(st, b2, t);
  };
  return wrap_quadrature_phi(impl, b2_range);
}

}  // namespace finsler
