// SPDX-License-Identifier: Apache-2.0

#include "finsler/catalog.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/errors.hpp"
#include "finsler/generator.hpp"

namespace finsler::catalog {

namespace {

Jet norm2(std::span<const Jet> x) {
  Jet r2 = Jet::constant(x[0].space(), 0.0);
  for (const Jet& xi : x) r2 += xi * xi;
  return r2;
}

double norm2(std::span<const double> x) {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return r2;
}

std::function<double(double)> const_fn(double v) {
  return [v](double) { return v; };
}

std::function<double(double)> zero_fn() {
  return [](double) { return 0.0; };
}

}  // namespace

RiemannianMetric constant_curvature_alpha(double kappa, int dim) {
  RiemannianMetric m;
  m.dim = dim;
  m.name = "constant-curvature(kappa=" + std::to_string(kappa) + ")";
  m.coeffs = [kappa, dim](std::span<const Jet> x) {
    auto sp = x[0].space();
    Jet A = 1.0 + kappa * norm2(x);
    Jet A2 = A * A;
    Matrix<Jet> a(dim, Jet::constant(sp, 0.0));
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        Jet v = -kappa * x[i] * x[j];
        if (i == j) v += A;
        v /= A2;
        a(i, j) = v;
        a(j, i) = v;
      }
    }
    return a;
  };
  m.admissible = [kappa](std::span<const double> x) {
    return 1.0 + kappa * norm2(x) > 1e-8;
  };
  return m;
}

namespace {

RiemannianMetric euclidean_alpha(int dim) {
  RiemannianMetric m;
  m.dim = dim;
  m.name = "euclidean";
  m.coeffs = [dim](std::span<const Jet> x) {
    auto sp = x[0].space();
    Matrix<Jet> a(dim, Jet::constant(sp, 0.0));
    for (int i = 0; i < dim; ++i) a(i, i) = Jet::constant(sp, 1.0);
    return a;
  };
  return m;
}

/// a_ij = delta_ij / w(|x|^2)^2 for alpha = |y| / w; w given as a jet form.
template <typename W>
RiemannianMetric conformal_alpha(W w, std::string name, int dim,
                                 std::function<bool(std::span<const double>)>
                                     admissible) {
  RiemannianMetric m;
  m.dim = dim;
  m.name = std::move(name);
  m.coeffs = [w, dim](std::span<const Jet> x) {
    auto sp = x[0].space();
    Jet f = w(norm2(x));
    Jet f2 = f * f;
    Matrix<Jet> a(dim, Jet::constant(sp, 0.0));
    for (int i = 0; i < dim; ++i) a(i, i) = 1.0 / f2;
    return a;
  };
  m.admissible = std::move(admissible);
  return m;
}

struct Ex71Closed {
  double kappa, d1, d2;
  std::vector<double> a;

  // btilde_i and btilde^2 at double coordinates
  double btilde2(std::span<const double> x) const {
    const int n = static_cast<int>(x.size());
    const double r2 = norm2(x);
    const double A = 1.0 + kappa * r2;
    double ax = 0.0;
    for (int i = 0; i < n; ++i) ax += a[i] * x[i];
    double bb = 0.0, xb = 0.0;
    for (int i = 0; i < n; ++i) {
      const double bt = (d1 * x[i] + A * a[i] - kappa * ax * x[i]) /
                        (A * std::sqrt(A));
      bb += bt * bt;
      xb += x[i] * bt;
    }
    return A * (bb + kappa * xb * xb);
  }
  double b2(std::span<const double> x) const { return btilde2(x) - d2; }
};

}  // namespace

AlphaBetaEntry example71(double kappa, double delta1, double delta2,
                         std::vector<double> a, int dim) {
  if (static_cast<int>(a.size()) != dim)
    throw ConfigError("example71: the constant vector a must have length " +
                      std::to_string(dim));
  AlphaBetaEntry e;
  e.id = delta2 == 0.0 ? "ex71d20" : "ex71";
  e.dim = dim;
  e.alpha = constant_curvature_alpha(kappa, dim);
  const Ex71Closed closed{kappa, delta1, delta2, a};

  e.beta.dim = dim;
  e.beta.name = "ex71-beta";
  e.beta.coeffs = [kappa, delta1, delta2, a, dim](std::span<const Jet> x) {
    auto sp = x[0].space();
    Jet r2 = norm2(x);
    Jet A = 1.0 + kappa * r2;
    Jet ax = Jet::constant(sp, 0.0);
    for (int i = 0; i < dim; ++i) ax += a[i] * x[i];
    Jet scale = 1.0 / (A * sqrt(A));
    std::vector<Jet> btil;
    btil.reserve(dim);
    for (int i = 0; i < dim; ++i)
      btil.push_back((delta1 * x[i] + A * a[i] - kappa * ax * x[i]) * scale);
    // btilde^2 through the closed inverse a^{ij} = A(delta + kappa x x)
    Jet bb = Jet::constant(sp, 0.0), xb = Jet::constant(sp, 0.0);
    for (int i = 0; i < dim; ++i) {
      bb += btil[i] * btil[i];
      xb += x[i] * btil[i];
    }
    Jet btil2 = A * (bb + kappa * xb * xb);
    Jet b2 = btil2 - delta2;
    if (!(b2.value() > 0.0))
      throw DomainViolation("ex71: b^2 = btilde^2 - delta2 = " +
                            std::to_string(b2.value()) + " <= 0");
    Jet rescale = sqrt(b2 / btil2);  // 1/rho
    std::vector<Jet> b;
    b.reserve(dim);
    for (int i = 0; i < dim; ++i) b.push_back(btil[i] * rescale);
    return b;
  };

  e.expected_c = [closed](std::span<const double> x) {
    const double b2 = closed.b2(x);
    return b2 / (closed.d2 + b2);
  };
  e.expected_k = [closed](std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    const double b2 = closed.b2(x);
    const double b = std::sqrt(b2);
    double ax = 0.0;
    for (int i = 0; i < n; ++i) ax += closed.a[i] * x[i];
    return (closed.d2 + b2) * (closed.d1 - closed.kappa * ax) /
           (b2 * b * std::sqrt((b2 + closed.d2) *
                               (1.0 + closed.kappa * norm2(x))));
  };
  e.c_of_b2 = [delta2](double b2) { return b2 / (delta2 + b2); };

  e.alpha.admissible = [kappa, closed](std::span<const double> x) {
    if (!(1.0 + kappa * norm2(x) > 1e-8)) return false;
    const int n = static_cast<int>(x.size());
    double ax = 0.0;
    for (int i = 0; i < n; ++i) ax += closed.a[i] * x[i];
    if (std::abs(closed.d1 - kappa * ax) < 1e-3) return false;  // k = 0
    const double b2 = closed.b2(x);
    return b2 > 0.02 && b2 < 0.80;
  };
  if (delta2 == 0.0) {
    e.x_radius_lo = 0.15;
    e.x_radius_hi = 0.9;
  } else {
    // delta1 = 3, delta2 = 1 has its admissible shell near |x| ~ 0.4
    e.x_radius_lo = 0.3;
    e.x_radius_hi = 0.55;
  }
  e.params = {{"kappa", kappa}, {"delta1", delta1}, {"delta2", delta2},
              {"a", a}};
  return e;
}

AlphaBetaEntry example72(double eps, int dim) {
  if (eps == 0.0) throw ConfigError("example72 needs eps != 0");
  AlphaBetaEntry e;
  e.id = "ex72";
  e.dim = dim;
  e.alpha = conformal_alpha(
      [](const Jet& r2) { return 2.0 * sqrt(r2); }, "ex72-alpha", dim,
      [](std::span<const double> x) {
        const double r = std::sqrt(norm2(x));
        return r > 0.1 && r < 0.95;
      });
  e.beta.dim = dim;
  e.beta.name = "ex72-beta";
  e.beta.coeffs = [eps, dim](std::span<const Jet> x) {
    Jet f = 2.0 * eps * exp(-norm2(x));
    std::vector<Jet> b;
    b.reserve(dim);
    for (int i = 0; i < dim; ++i) b.push_back(f * x[i]);
    return b;
  };
  e.expected_c = [](std::span<const double>) { return 0.0; };
  e.expected_k = [eps](std::span<const double> x) {
    const double r2 = norm2(x);
    return (1.0 - r2) * std::exp(r2) / (eps * r2);
  };
  e.c_of_b2 = zero_fn();
  e.x_radius_lo = 0.15;
  e.x_radius_hi = 0.9;
  e.params = {{"eps", eps}};
  return e;
}

AlphaBetaEntry example73(int dim) {
  AlphaBetaEntry e;
  e.id = "ex73";
  e.dim = dim;
  e.alpha = conformal_alpha(
      [](const Jet& r2) { return 1.0 + r2; }, "ex73-alpha", dim,
      [](std::span<const double> x) {
        const double r = std::sqrt(norm2(x));
        return r > 0.05 && r < 0.6;
      });
  e.beta.dim = dim;
  e.beta.name = "ex73-beta";
  e.beta.coeffs = [dim](std::span<const Jet> x) {
    Jet r2 = norm2(x);
    Jet f = (1.0 + r2) / (1.0 - r2);
    std::vector<Jet> b;
    b.reserve(dim);
    for (int i = 0; i < dim; ++i) b.push_back(f * x[i]);
    return b;
  };
  auto b2_closed = [](std::span<const double> x) {
    const double r2 = norm2(x);
    const double A = 1.0 + r2;
    return A * A * A * A * r2 / ((1.0 - r2) * (1.0 - r2));
  };
  // kcb^2 = (1+r^2)^2 and k(1-c) = 4(2-r^2)/(1+r^2)^2
  e.expected_k = [b2_closed](std::span<const double> x) {
    const double r2 = norm2(x);
    const double A = 1.0 + r2;
    const double lam = A * A;
    const double tau = 4.0 * (2.0 - r2) / (A * A);
    return lam / b2_closed(x) + tau;
  };
  e.expected_c = [b2_closed, ek = e.expected_k](std::span<const double> x) {
    const double r2 = norm2(x);
    const double A = 1.0 + r2;
    return A * A / (b2_closed(x) * ek(x));
  };
  e.x_radius_lo = 0.1;
  e.x_radius_hi = 0.58;
  e.params = nlohmann::json::object();
  return e;
}

AlphaBetaEntry flat_parallel(std::vector<double> b_const, int dim) {
  if (static_cast<int>(b_const.size()) != dim)
    throw ConfigError("flat_parallel: the constant form must have length " +
                      std::to_string(dim));
  AlphaBetaEntry e;
  e.id = "flat";
  e.dim = dim;
  e.alpha = euclidean_alpha(dim);
  e.beta.dim = dim;
  e.beta.name = "constant-form";
  e.beta.coeffs = [b_const, dim](std::span<const Jet> x) {
    auto sp = x[0].space();
    std::vector<Jet> b;
    b.reserve(dim);
    for (int i = 0; i < dim; ++i) b.push_back(Jet::constant(sp, b_const[i]));
    return b;
  };
  e.beta_parallel = true;
  e.x_radius_lo = 0.05;
  e.x_radius_hi = 0.9;
  e.params = {{"b", b_const}};
  return e;
}

AlphaBetaEntry spherical_data(int dim) {
  AlphaBetaEntry e;
  e.id = "sph";
  e.dim = dim;
  e.alpha = euclidean_alpha(dim);
  e.beta.dim = dim;
  e.beta.name = "radial-form";
  e.beta.coeffs = [dim](std::span<const Jet> x) {
    std::vector<Jet> b;
    b.reserve(dim);
    for (int i = 0; i < dim; ++i) b.push_back(x[i] + 0.0);
    return b;
  };
  e.alpha.admissible = [](std::span<const double> x) {
    return norm2(x) > 1e-4;
  };
  // b_{i|j} = delta_ij: lambda = 1, tau = 0
  e.expected_k = [](std::span<const double> x) { return 1.0 / norm2(x); };
  e.expected_c = [](std::span<const double>) { return 1.0; };
  e.c_of_b2 = const_fn(1.0);
  e.x_radius_lo = 0.1;
  e.x_radius_hi = 0.85;
  e.params = nlohmann::json::object();
  return e;
}

PhiEntry phi_one(int dim) {
  (void)dim;
  PhiEntry e;
  e.id = "one";
  e.phi.eval = [](const Jet& b2, const Jet& s) {
    (void)s;
    return Jet::constant(b2.space(), 1.0);
  };
  e.phi.name = "phi=1";
  e.params = {const_fn(1.0), zero_fn(), zero_fn()};
  e.matches_any_c = true;
  e.params_json = nlohmann::json::object();
  return e;
}

PhiEntry phi_ex61(double h, int dim) {
  (void)dim;
  PhiEntry e;
  e.id = "ex61";
  e.phi.eval = [h](const Jet& b2, const Jet& s) {
    (void)b2;
    return 1.0 + h * s;
  };
  e.phi.name = "randers(h=" + std::to_string(h) + ")";
  // phi > 0 and both positivity margins are 1; b0 caps |h| b below 1
  if (h != 0.0) e.phi.b0_sq = 0.9 / (h * h);
  e.params = {const_fn(1.0), zero_fn(), zero_fn()};
  e.c_of_b2 = const_fn(1.0);
  e.params_json = {{"h", h}};
  return e;
}

PhiEntry phi_ex62(double h, int dim) {
  (void)dim;
  PhiEntry e;
  e.id = "ex62";
  e.phi.eval = [h](const Jet& b2, const Jet& s) {
    return h * s + sqrt(1.0 - b2 + s * s) / (1.0 - b2);
  };
  e.phi.name = "ex62(h=" + std::to_string(h) + ")";
  e.phi.b0_sq = 0.81;  // the 1 - b^2 denominator caps the range
  e.params = {const_fn(1.0), zero_fn(), zero_fn()};
  e.c_of_b2 = const_fn(1.0);
  e.params_json = {{"h", h}};
  return e;
}

PhiEntry phi_ex63(double c, double h, int dim) {
  (void)dim;
  PhiEntry e;
  e.id = c == 0.0 ? "ex63c0" : (c == 1.0 ? "ex63c1" : "ex63");
  e.phi.eval = [c, h](const Jet& b2, const Jet& s) {
    return 1.0 + pow(b2, c) + h * s + pow(b2, c - 1.0) * s * s;
  };
  e.phi.name = "ex63(c=" + std::to_string(c) + ",h=" + std::to_string(h) +
               ")";
  e.params = {const_fn(c), zero_fn(), zero_fn()};
  e.c_of_b2 = const_fn(c);
  e.params_json = {{"c", c}, {"h", h}};
  return e;
}

PhiEntry phi_ex64(double h, int dim) {
  (void)dim;
  PhiEntry e;
  e.id = "ex64";
  e.phi.eval = [h](const Jet& b2, const Jet& s) {
    Jet b4 = b2 * b2;
    Jet w = 1.0 + b4 - b2 * s * s;
    Jet num = (1.0 + b2) * w + s * s * (1.0 - b2);
    Jet den = (1.0 + b4) * (1.0 + b4);
    return h * s + num / den * sqrt((1.0 - b2) * exp(b2) / w);
  };
  e.phi.name = "ex64(h=" + std::to_string(h) + ")";
  e.phi.b0_sq = 0.81;  // needs c = 1 - b^2 > 0
  e.params = {[](double b2) { return 1.0 - b2; },
              [](double b2) {
                return b2 * b2 * std::sqrt(b2) / (1.0 - b2);
              },
              [](double b2) {
                return 2.0 * b2 * b2 * std::sqrt(b2) / (1.0 - b2);
              }};
  e.c_of_b2 = [](double b2) { return 1.0 - b2; };
  e.params_json = {{"h", h}};
  return e;
}

PhiEntry phi_lem22(double iota1, double iota2, int dim) {
  (void)dim;
  PhiEntry e;
  e.id = "lem22";
  e.phi.eval = [iota1, iota2](const Jet& b2, const Jet& s) {
    (void)b2;
    return iota2 * sqrt(1.0 + iota1 * s * s);
  };
  e.phi.name = "riemannian-type(i1=" + std::to_string(iota1) + ")";
  // Q = iota1 s: the PDE holds with c = 1, mu = nu = 0
  e.params = {const_fn(1.0), zero_fn(), zero_fn()};
  e.c_of_b2 = const_fn(1.0);
  e.params_json = {{"iota1", iota1}, {"iota2", iota2}};
  return e;
}

namespace {

const double kPerturbAmplitude = 0.1;

PhiEntry perturb_entry(PhiEntry e) {
  e.phi = with_cubic_perturbation(e.phi, kPerturbAmplitude);
  e.id += ".perturbed";
  e.perturbed = true;
  return e;
}

}  // namespace

std::vector<std::string> alphabeta_ids() {
  return {"ex71", "ex71d20", "ex72", "ex73", "flat", "sph"};
}

std::vector<std::string> phi_ids() {
  return {"one", "ex61", "ex62", "ex63c0", "ex63c1", "ex64", "lem22"};
}

bool is_alphabeta_id(const std::string& id) {
  auto ids = alphabeta_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

bool is_phi_id(const std::string& id) {
  std::string base = id;
  if (auto pos = base.find(".perturbed"); pos != std::string::npos)
    base = base.substr(0, pos);
  auto ids = phi_ids();
  return std::find(ids.begin(), ids.end(), base) != ids.end();
}

AlphaBetaEntry make_alphabeta(const std::string& id, int dim) {
  if (id == "ex71")
    // delta1 = 1 would leave no admissible points (btilde^2 < delta2
    // everywhere); see the catalog notes.
    return example71(1.0, 3.0, 1.0, std::vector<double>(dim, 0.0), dim);
  if (id == "ex71d20")
    return example71(1.0, 1.0, 0.0, std::vector<double>(dim, 0.0), dim);
  if (id == "ex72") return example72(1.0, dim);
  if (id == "ex73") return example73(dim);
  if (id == "flat") {
    std::vector<double> b(dim, 0.0);
    b[0] = 0.5;
    return flat_parallel(b, dim);
  }
  if (id == "sph") return spherical_data(dim);
  throw ConfigError("unknown alpha-beta catalog id '" + id + "'");
}

PhiEntry make_phi(const std::string& id, int dim) {
  std::string base = id;
  bool perturbed = false;
  if (auto pos = base.find(".perturbed"); pos != std::string::npos) {
    base = base.substr(0, pos);
    perturbed = true;
  }
  PhiEntry e;
  if (base == "one")
    e = phi_one(dim);
  else if (base == "ex61")
    e = phi_ex61(1.0, dim);
  else if (base == "ex62")
    e = phi_ex62(0.0, dim);
  else if (base == "ex63c0")
    e = phi_ex63(0.0, 0.0, dim);
  else if (base == "ex63c1")
    e = phi_ex63(1.0, 0.0, dim);
  else if (base == "ex64")
    e = phi_ex64(0.0, dim);
  else if (base == "lem22")
    e = phi_lem22(2.0, 1.0, dim);
  else
    throw ConfigError("unknown phi catalog id '" + id + "'");
  if (perturbed) e = perturb_entry(std::move(e));
  return e;
}

std::string default_phi_for(const std::string& ab_id) {
  if (ab_id == "ex72") return "ex63c0";
  if (ab_id == "ex71d20" || ab_id == "sph" || ab_id == "flat") return "ex61";
  throw ConfigError("no default Douglas partner for '" + ab_id + "'");
}

nlohmann::json alphabeta_to_json(const AlphaBetaEntry& e) {
  return {{"id", e.id}, {"params", e.params}};
}

nlohmann::json phi_to_json(const PhiEntry& e) {
  std::string base = e.id;
  if (auto pos = base.find(".perturbed"); pos != std::string::npos)
    base = base.substr(0, pos);
  return {{"id", base}, {"params", e.params_json},
          {"perturbed", e.perturbed}};
}

AlphaBetaEntry alphabeta_from_json(const nlohmann::json& j, int dim) {
  const std::string id = j.at("id").get<std::string>();
  const nlohmann::json p =
      j.contains("params") ? j.at("params") : nlohmann::json::object();
  if (id == "ex71" || id == "ex71d20") {
    std::vector<double> a =
        p.contains("a") ? p.at("a").get<std::vector<double>>()
                        : std::vector<double>(dim, 0.0);
    return example71(p.value("kappa", 1.0),
                     p.value("delta1", id == "ex71" ? 3.0 : 1.0),
                     p.value("delta2", id == "ex71" ? 1.0 : 0.0), a, dim);
  }
  if (id == "ex72") return example72(p.value("eps", 1.0), dim);
  if (id == "ex73") return example73(dim);
  if (id == "flat") {
    std::vector<double> b(dim, 0.0);
    b[0] = 0.5;
    if (p.contains("b")) b = p.at("b").get<std::vector<double>>();
    return flat_parallel(b, dim);
  }
  if (id == "sph") return spherical_data(dim);
  throw ConfigError("unknown alpha-beta id '" + id + "' in metric spec");
}

namespace {

std::function<double(double)> named_b2_function(const nlohmann::json& j,
                                                const std::string& what) {
  if (j.is_number()) return const_fn(j.get<double>());
  const std::string name = j.get<std::string>();
  if (name == "zero") return zero_fn();
  if (name == "one") return const_fn(1.0);
  if (name == "one_minus_b2") return [](double b2) { return 1.0 - b2; };
  if (name == "ex64_mu")
    return [](double b2) { return b2 * b2 * std::sqrt(b2) / (1.0 - b2); };
  if (name == "ex64_nu")
    return
        [](double b2) { return 2.0 * b2 * b2 * std::sqrt(b2) / (1.0 - b2); };
  throw ConfigError("unknown " + what + " function '" + name + "'");
}

PhiEntry generator_phi_from_json(const nlohmann::json& j, int dim) {
  (void)dim;
  GeneratorSpec spec;
  const std::string Phi = j.value("Phi", "sqrt_zeta");
  if (Phi == "sqrt_zeta") {
    spec.Phi = [](double z) { return std::sqrt(z); };
    spec.Phi_prime = [](double z) { return 0.5 / std::sqrt(z); };
  } else if (Phi == "sqrt_zeta_over_one_minus_zeta") {
    spec.Phi = [](double z) { return std::sqrt(z / (1.0 - z)); };
    spec.Phi_prime = [](double z) {
      return 0.5 / (std::sqrt(z / (1.0 - z)) * (1.0 - z) * (1.0 - z));
    };
  } else if (Phi == "one_plus_zeta_sqrt_zeta") {
    spec.Phi = [](double z) { return (1.0 + z) * std::sqrt(z); };
    spec.Phi_prime = [](double z) {
      return std::sqrt(z) + 0.5 * (1.0 + z) / std::sqrt(z);
    };
  } else if (Phi == "ex64") {
    spec.Phi = [](double z) {
      return std::sqrt(z) / std::pow(1.0 - z, 1.5);
    };
    spec.Phi_prime = [](double z) {
      const double om = 1.0 - z;
      return 0.5 / (std::sqrt(z) * std::pow(om, 1.5)) +
             1.5 * std::sqrt(z) / std::pow(om, 2.5);
    };
  } else {
    throw ConfigError("unknown generator Phi '" + Phi + "'");
  }
  spec.params.c = named_b2_function(j.value("c", nlohmann::json(1.0)), "c");
  spec.params.mu =
      named_b2_function(j.value("mu", nlohmann::json("zero")), "mu");
  spec.params.nu =
      named_b2_function(j.value("nu", nlohmann::json("zero")), "nu");
  const double h = j.value("h", 0.0);
  spec.h = const_fn(h);
  if (j.contains("b2_range"))
    spec.b2_range = {j.at("b2_range").at(0).get<double>(),
                     j.at("b2_range").at(1).get<double>()};
  spec.b2_anchor = j.value("b2_anchor",
                           0.5 * (spec.b2_range.first + spec.b2_range.second));
  spec.quad_tol = j.value("quad_tol", 1e-11);

  PhiEntry e;
  e.id = "generator:" + Phi;
  e.phi = phi_from_generator(spec);
  e.params = spec.params;
  e.b2_lo = spec.b2_range.first;
  e.b2_hi = spec.b2_range.second;
  e.params_json = j;
  return e;
}

}  // namespace

PhiEntry phi_from_json(const nlohmann::json& j, int dim) {
  const std::string id = j.at("id").get<std::string>();
  if (id == "generator") return generator_phi_from_json(j, dim);
  const nlohmann::json p =
      j.contains("params") ? j.at("params") : nlohmann::json::object();
  PhiEntry e;
  if (id == "one")
    e = phi_one(dim);
  else if (id == "ex61")
    e = phi_ex61(p.value("h", 1.0), dim);
  else if (id == "ex62")
    e = phi_ex62(p.value("h", 0.0), dim);
  else if (id == "ex63" || id == "ex63c0" || id == "ex63c1")
    e = phi_ex63(p.value("c", id == "ex63c1" ? 1.0 : 0.0),
                 p.value("h", 0.0), dim);
  else if (id == "ex64")
    e = phi_ex64(p.value("h", 0.0), dim);
  else if (id == "lem22")
    e = phi_lem22(p.value("iota1", 2.0), p.value("iota2", 1.0), dim);
  else
    throw ConfigError("unknown phi id '" + id + "' in metric spec");
  if (j.value("perturbed", false)) e = perturb_entry(std::move(e));
  return e;
}

namespace {

void classify_pair(MetricSelection& sel) {
  if (!sel.ab || !sel.ph) return;
  const auto& ab = *sel.ab;
  const auto& ph = *sel.ph;
  bool matched = false;
  if (ph.matches_any_c) {
    matched = true;  // Riemannian: F = alpha
  } else if (ab.beta_parallel) {
    matched = true;  // every spray correction carries an r/s factor
  } else if (ab.c_of_b2 && ph.c_of_b2) {
    matched = true;
    for (int i = 0; i <= 4; ++i) {
      const double b2 = ph.b2_lo + (ph.b2_hi - ph.b2_lo) * i / 4.0;
      if (std::abs(ab.c_of_b2(b2) - ph.c_of_b2(b2)) > 1e-9) matched = false;
    }
  }
  if (ph.perturbed) {
    sel.negative_control = matched;
    sel.expected_douglas = false;
  } else {
    sel.expected_douglas = matched;
  }
}

}  // namespace

MetricSelection resolve_selector(const std::string& selector, int dim) {
  std::string body = selector;
  if (body.rfind("catalog:", 0) == 0) body = body.substr(8);
  if (body.empty()) throw ConfigError("empty metric selector");

  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = body.find('+', start);
    if (pos == std::string::npos) {
      parts.push_back(body.substr(start));
      break;
    }
    parts.push_back(body.substr(start, pos - start));
    start = pos + 1;
  }
  if (parts.size() > 2)
    throw ConfigError("metric selector '" + selector +
                      "' has more than two components");

  MetricSelection sel;
  sel.id = body;
  std::optional<std::string> pending_perturbed;
  for (const auto& part : parts) {
    if (part == "perturbed") {
      pending_perturbed = part;
      continue;
    }
    if (is_alphabeta_id(part)) {
      if (sel.ab)
        throw ConfigError("two alpha-beta components in '" + selector + "'");
      sel.ab = make_alphabeta(part, dim);
    } else if (is_phi_id(part)) {
      if (sel.ph)
        throw ConfigError("two phi components in '" + selector + "'");
      sel.ph = make_phi(part, dim);
    } else {
      throw ConfigError("unknown catalog id '" + part + "' in '" + selector +
                        "'");
    }
  }
  if (pending_perturbed) {
    if (!sel.ab)
      throw ConfigError(
          "bare 'perturbed' needs an alpha-beta component to pick the "
          "default partner");
    if (sel.ph)
      throw ConfigError("bare 'perturbed' conflicts with an explicit phi in "
                        "'" + selector + "'");
    sel.ph = make_phi(default_phi_for(sel.ab->id) + ".perturbed", dim);
  }
  classify_pair(sel);
  return sel;
}

MetricSelection selection_from_json(const nlohmann::json& j, int dim) {
  if (j.is_string()) return resolve_selector(j.get<std::string>(), dim);
  MetricSelection sel;
  if (j.contains("alphabeta")) {
    sel.ab = alphabeta_from_json(j.at("alphabeta"), dim);
    sel.id = sel.ab->id;
  }
  if (j.contains("phi")) {
    sel.ph = phi_from_json(j.at("phi"), dim);
    sel.id = sel.id.empty() ? sel.ph->id : sel.id + "+" + sel.ph->id;
  }
  if (!sel.ab && !sel.ph)
    throw ConfigError("inline metric spec needs 'alphabeta' and/or 'phi'");
  classify_pair(sel);
  return sel;
}

GeneralABMetric assemble(const AlphaBetaEntry& ab, const PhiEntry& ph) {
  GeneralABMetric m;
  m.alpha = ab.alpha;
  m.beta = ab.beta;
  m.phi = ph.phi;
  m.dim = ab.dim;
  m.name = ab.id + "+" + ph.id;
  return m;
}

GeneralABMetric spherically_symmetric(const PhiModel& phi, int dim) {
  AlphaBetaEntry data = spherical_data(dim);
  GeneralABMetric m;
  m.alpha = data.alpha;
  m.beta = data.beta;
  m.phi = phi;
  m.dim = dim;
  m.name = "sph+" + phi.name;
  return m;
}

PdeParams corollary_params(std::function<double(double)> f,
                           std::function<double(double)> eta) {
  PdeParams p;
  p.c = const_fn(1.0);
  p.nu = [eta](double b2) { return eta(b2) * b2 * std::sqrt(b2); };
  p.mu = [f, eta](double b2) {
    const double b3 = b2 * std::sqrt(b2);
    return eta(b2) * b3 + f(b2) * b3 * b2;
  };
  return p;
}

double pde02cor_residual(const PhiModel& phi,
                         const std::function<double(double)>& f,
                         const std::function<double(double)>& eta, double b2,
                         double s) {
  const PhiPartials p = phi_partials(phi, b2, s);
  const double g = eta(b2) + f(b2) * s * s;
  return (g * (b2 - s * s) - 1.0) * p.phi22 + 2.0 * (p.phi1 - s * p.phi12) +
         g * (p.phi - s * p.phi2);
}

}  // namespace finsler::catalog
