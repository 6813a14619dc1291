// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "finsler/catalog.hpp"
#include "finsler/errors.hpp"
#include "finsler/phi.hpp"
#include "finsler/rng.hpp"

using namespace finsler;

namespace {

PhiModel randers_phi(double h) {
  PhiModel m;
  m.eval = [h](const Jet& b2, const Jet& s) {
    (void)b2;
    return 1.0 + h * s;
  };
  m.name = "randers";
  return m;
}

PhiModel bare_s_phi() {
  PhiModel m;
  m.eval = [](const Jet& b2, const Jet& s) {
    (void)b2;
    return s + 0.0;
  };
  m.name = "phi=s";
  return m;
}

}  // namespace

TEST_CASE("aux quantities on closed forms") {
  SUBCASE("randers phi = 1 + s") {
    auto phi = randers_phi(1.0);
    for (double s : {-0.4, 0.0, 0.3, 0.6}) {
      auto q = aux_quantities(phi, 0.64, s);
      CHECK(q.Q == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(q.Theta == doctest::Approx(1.0 / (2.0 * (1.0 + s))).epsilon(1e-13));
      CHECK(q.Psi == doctest::Approx(0.0));
      CHECK(q.R == doctest::Approx(0.0));
    }
  }
  SUBCASE("riemannian-type phi = sqrt(1 + 2 s^2) has Q = 2s") {
    auto e = catalog::phi_lem22(2.0, 1.0, 3);
    for (double b2 : {0.25, 0.49, 0.7})
      for (double s : {-0.4, -0.1, 0.2, 0.45}) {
        if (s * s > b2) continue;
        auto q = aux_quantities(e.phi, b2, s);
        CHECK(q.Q == doctest::Approx(2.0 * s).epsilon(1e-13));
      }
  }
  SUBCASE("b2-independent phi kills R, Pi, Omega, Xi") {
    auto e = catalog::phi_lem22(0.5, 3.0, 3);
    auto q = aux_quantities(e.phi, 0.5, 0.3);
    CHECK(std::abs(q.R) < 1e-14);
    CHECK(std::abs(q.Pi) < 1e-14);
    CHECK(std::abs(q.Omega) < 1e-14);
    CHECK(std::abs(q.Xi) < 1e-14);
  }
  SUBCASE("positivity violations are reported by condition") {
    auto phi = bare_s_phi();
    CHECK_THROWS_WITH_AS(aux_quantities(phi, 0.36, 0.3),
                         doctest::Contains("phi - s phi_2"), DomainViolation);
  }
}

TEST_CASE("douglas PDE residuals of the solution catalog") {
  SUBCASE("ex61 is exact") {
    auto e = catalog::phi_ex61(1.0, 3);
    for (auto [b2, s] : phi_grid(0.05, 0.81, 12, 12))
      CHECK(pde02_residual(e.phi, e.params, b2, s) == 0.0);
  }
  SUBCASE("ex62 on the grid") {
    auto e = catalog::phi_ex62(0.7, 3);
    double worst = 0.0;
    for (auto [b2, s] : phi_grid(0.1, 0.8, 40, 40))
      worst = std::max(worst,
                       std::abs(pde02_residual(e.phi, e.params, b2, s)));
    CHECK(worst < 1e-12);
  }
  SUBCASE("ex63 at generic constant c") {
    auto e = catalog::phi_ex63(0.7, 0.3, 3);
    double worst = 0.0;
    for (auto [b2, s] : phi_grid(0.1, 0.8, 20, 20))
      worst = std::max(worst,
                       std::abs(pde02_residual(e.phi, e.params, b2, s)));
    CHECK(worst < 1e-12);
  }
  SUBCASE("ex64 with its mu and nu") {
    auto e = catalog::phi_ex64(0.4, 3);
    double worst = 0.0;
    for (auto [b2, s] : phi_grid(0.05, 0.81, 40, 40))
      worst = std::max(worst,
                       std::abs(pde02_residual(e.phi, e.params, b2, s)));
    CHECK(worst < 1e-10);
  }
  SUBCASE("the cubic perturbation breaks the PDE") {
    auto e = catalog::make_phi("ex63c0.perturbed", 3);
    double best = 1e300;
    for (auto [b2, s] : phi_grid(0.2, 0.7, 8, 8)) {
      if (std::abs(s) < 0.1) continue;
      best = std::min(best,
                      std::abs(pde02_residual(e.phi, e.params, b2, s)));
    }
    CHECK(best > 1e-4);
  }
  SUBCASE("residual is linear in phi") {
    auto a = with_cubic_perturbation(catalog::phi_ex62(0.0, 3).phi, 0.05);
    auto b = with_cubic_perturbation(catalog::phi_ex61(1.0, 3).phi, 0.02);
    PdeParams params = catalog::phi_ex61(1.0, 3).params;  // c=1, mu=nu=0
    auto sum = phi_sum(a, b);
    Xoshiro256pp rng(5);
    for (int t = 0; t < 40; ++t) {
      const double b2 = rng.uniform(0.1, 0.7);
      const double s = rng.uniform(-0.9, 0.9) * std::sqrt(b2);
      const double ra = pde02_residual(a, params, b2, s);
      const double rb = pde02_residual(b, params, b2, s);
      const double rs = pde02_residual(sum, params, b2, s);
      CHECK(std::abs(rs - (ra + rb)) < 1e-12);
    }
  }
}

TEST_CASE("positivity checks") {
  SUBCASE("randers margins are exactly one") {
    auto e = catalog::phi_ex61(1.0, 3);
    auto grid = phi_grid(0.05, 0.8, 10, 10);
    auto rep = positivity_check(e.phi, grid, 3);
    CHECK(rep.pass);
    CHECK(rep.min_cond1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.min_cond2 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("ex63 at c = 0 stays above 1") {
    auto e = catalog::phi_ex63(0.0, 0.0, 3);
    auto grid = phi_grid(0.05, 0.81, 20, 20);
    auto rep = positivity_check(e.phi, grid, 3);
    CHECK(rep.pass);
    CHECK(rep.min_cond1 >= 1.0 - 1e-12);
  }
  SUBCASE("phi = s fails the first condition") {
    auto phi = bare_s_phi();
    std::vector<std::pair<double, double>> grid{{0.36, 0.3}};
    auto rep = positivity_check(phi, grid, 3);
    CHECK(!rep.pass);
    CHECK(rep.min_cond1 == doctest::Approx(0.0));
    CHECK(rep.failures.size() == 1);
  }
  SUBCASE("the n = 2 mode drops the first condition") {
    // cond1 = -0.05 - 2 s^2 < 0 but cond2 = cond1 + 4 (b^2 - s^2) > 0
    PhiModel phi;
    phi.eval = [](const Jet& b2, const Jet& s) {
      (void)b2;
      return -0.05 + s + 2.0 * s * s;
    };
    phi.name = "n2-fixture";
    std::vector<std::pair<double, double>> grid{{0.36, 0.1}};
    CHECK(!positivity_check(phi, grid, 3).pass);
    CHECK(positivity_check(phi, grid, 2).pass);
  }
}

TEST_CASE("(phi - s phi_2)_2 = -s phi_22 via order-3 jets") {
  Xoshiro256pp rng(77);
  std::vector<PhiModel> cat{
      catalog::phi_ex61(1.0, 3).phi,   catalog::phi_ex62(0.3, 3).phi,
      catalog::phi_ex63(0.0, 0.0, 3).phi, catalog::phi_ex63(1.0, 0.2, 3).phi,
      catalog::phi_ex64(0.0, 3).phi,   catalog::phi_lem22(2.0, 1.0, 3).phi};
  auto sp = JetSpace::pure(2, 3);
  int checked = 0;
  for (const auto& phi : cat) {
    for (int t = 0; t < 40; ++t) {
      const double b2 = rng.uniform(0.1, 0.75);
      const double s = rng.uniform(-0.9, 0.9) * std::sqrt(b2);
      Jet b2j = Jet::variable(sp, 0, b2);
      Jet sj = Jet::variable(sp, 1, s);
      Jet f = phi.eval(b2j, sj);
      Jet f2 = derive(f, 1);  // order 2
      // phi - s phi_2 assembled in the order-2 algebra
      Jet w = truncate_to(f, f2.space()) - truncate_to(sj, f2.space()) * f2;
      const double lhs = w.first_partial(1);
      const double rhs = -s * f.partial({1, 1});
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
      ++checked;
    }
  }
  CHECK(checked == 240);
}

TEST_CASE("lem17 ratio for PDE solutions") {
  // ([(1-c)s^2 + c b^2] phi_22 - 2 b^2 (phi_1 - s phi_12)) / den2
  //   = (nu b^2 - (nu - mu) s^2) / b^3
  auto check_entry = [](const catalog::PhiEntry& e) {
    Xoshiro256pp rng(99);
    for (int t = 0; t < 60; ++t) {
      const double b2 = rng.uniform(0.1, 0.75);
      const double s = rng.uniform(-0.9, 0.9) * std::sqrt(b2);
      const auto q = aux_quantities(e.phi, b2, s);
      const double c = e.params.c(b2);
      const double mu = e.params.mu(b2);
      const double nu = e.params.nu(b2);
      const double lhs = (((1.0 - c) * s * s + c * b2) * q.phi22 -
                          2.0 * b2 * (q.phi1 - s * q.phi12)) /
                         q.den2;
      const double rhs =
          (nu * b2 - (nu - mu) * s * s) / (b2 * std::sqrt(b2));
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
    }
  };
  check_entry(catalog::phi_ex63(0.0, 0.0, 3));
  check_entry(catalog::phi_ex64(0.2, 3));
}

TEST_CASE("lemma 2.2 reduction") {
  std::vector<double> svals{-0.45, -0.3, -0.15, 0.1, 0.25, 0.4};
  SUBCASE("sqrt(1 + 2 s^2) is riemannian-type") {
    auto e = catalog::phi_lem22(2.0, 1.0, 3);
    auto v = lemma22_reduction(e.phi, 0.5, svals);
    CHECK(v.riemannian_type);
    CHECK(v.iota1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v.deviation < 1e-12);
  }
  SUBCASE("randers is not") {
    auto phi = randers_phi(1.0);
    auto v = lemma22_reduction(phi, 0.5, svals);
    CHECK(!v.riemannian_type);
  }
  SUBCASE("scaled family recovers both iotas") {
    auto e = catalog::phi_lem22(0.5, 3.0, 3);
    auto v = lemma22_reduction(e.phi, 0.5, svals);
    CHECK(v.riemannian_type);
    CHECK(v.iota1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v.iota2 == doctest::Approx(3.0).epsilon(1e-12));
  }
}
