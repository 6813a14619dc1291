// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/linalg.hpp"
#include "finsler/rng.hpp"
#include "test_util.hpp"

using namespace finsler;

TEST_CASE("squaring a seeded variable") {
  auto sp = JetSpace::pure(1, 2);
  const double x0 = 1.7;
  Jet x = Jet::variable(sp, 0, x0);
  Jet sq = x * x;
  CHECK(sq.value() == doctest::Approx(x0 * x0).epsilon(1e-15));
  CHECK(sq.coefficient(sp->unit_index(0)) ==
        doctest::Approx(2 * x0).epsilon(1e-15));
  std::vector<std::uint8_t> e{2};
  CHECK(sq.coefficient(std::span<const std::uint8_t>(e)) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("geometric series 1/(1-t)") {
  auto sp = JetSpace::pure(1, 3);
  Jet t = Jet::variable(sp, 0, 0.0);
  Jet f = 1.0 / (1.0 - t);
  for (int k = 0; k <= 3; ++k)
    CHECK(f.coefficient(k) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sqrt(1 + 2 s^2) at s = 0.3 vs finite differences") {
  auto sp = JetSpace::pure(1, 2);
  auto f = [](const std::vector<double>& v) {
    return std::sqrt(1.0 + 2.0 * v[0] * v[0]);
  };
  Jet s = Jet::variable(sp, 0, 0.3);
  Jet j = sqrt(1.0 + 2.0 * s * s);
  // frozen from the central-difference oracle (step 1e-5)
  CHECK(j.value() == doctest::Approx(1.0862780).epsilon(1e-6));
  CHECK(j.first_partial(0) == doctest::Approx(0.5523448).epsilon(1e-6));
  CHECK(j.value() == doctest::Approx(f({0.3})).epsilon(1e-14));
  CHECK(j.first_partial(0) ==
        doctest::Approx(testutil::fd_first(f, {0.3}, 0)).epsilon(1e-8));
  CHECK(j.partial({0, 0}) ==
        doctest::Approx(testutil::fd_second(f, {0.3}, 0, 0, 2e-4))
            .epsilon(1e-6));
}

TEST_CASE("elementary functions on jets") {
  auto sp = JetSpace::pure(1, 4);
  SUBCASE("sqrt of a constant") {
    Jet c = Jet::constant(sp, 4.0);
    Jet r = sqrt(c);
    CHECK(r.value() == doctest::Approx(2.0));
    CHECK(r.coefficient(1) == doctest::Approx(0.0));
  }
  SUBCASE("exp series") {
    Jet x = Jet::variable(sp, 0, 0.0);
    Jet e = exp(x);
    const double expected[5] = {1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0};
    for (int k = 0; k <= 4; ++k)
      CHECK(e.coefficient(k) == doctest::Approx(expected[k]).epsilon(1e-14));
  }
  SUBCASE("pow as square root") {
    Jet b2 = Jet::constant(sp, 0.25);
    CHECK(pow(b2, 0.5).value() == doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("integer pow handles negative bases") {
    Jet x = Jet::variable(sp, 0, -1.3);
    Jet p = pow(x, 3.0);
    CHECK(p.value() == doctest::Approx(-1.3 * 1.3 * 1.3));
    CHECK(p.first_partial(0) == doctest::Approx(3 * 1.3 * 1.3));
  }
  SUBCASE("round trips") {
    Jet x = Jet::variable(sp, 0, 0.8);
    Jet a = 1.2 + x * x;
    Jet b = exp(log(a));
    Jet c = sqrt(a) * sqrt(a);
    Jet d = pow(a, 0.7) * pow(a, -0.7);
    for (int k = 0; k <= 4; ++k) {
      CHECK(b.coefficient(k) == doctest::Approx(a.coefficient(k)).epsilon(1e-13));
      CHECK(c.coefficient(k) == doctest::Approx(a.coefficient(k)).epsilon(1e-13));
    }
    CHECK(d.value() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("domain violations") {
  auto sp = JetSpace::pure(2, 2);
  Jet zero = Jet::variable(sp, 0, 0.0);
  Jet one = Jet::constant(sp, 1.0);
  CHECK_THROWS_AS(one / zero, DomainViolation);
  CHECK_THROWS_AS(sqrt(Jet::constant(sp, -1.0)), DomainViolation);
  CHECK_THROWS_AS(log(Jet::constant(sp, 0.0)), DomainViolation);
  CHECK_THROWS_AS(pow(Jet::constant(sp, -2.0), 0.5), DomainViolation);

  auto sp4 = JetSpace::pure(2, 4);
  Jet other = Jet::constant(sp4, 1.0);
  CHECK_THROWS_AS(one + other, Error);  // mixing truncation orders
}

TEST_CASE("polynomials of total degree <= 4 are exact") {
  Xoshiro256pp rng(20240817);
  auto sp = JetSpace::pure(3, 4);
  for (int trial = 0; trial < 20; ++trial) {
    // random polynomial as (coefficient, exponents) monomials
    struct Mono {
      double c;
      int e[3];
    };
    std::vector<Mono> poly;
    for (int m = 0; m < 12; ++m) {
      Mono mo;
      mo.c = rng.uniform(-2.0, 2.0);
      int deg = static_cast<int>(rng.next() % 5);
      mo.e[0] = static_cast<int>(rng.next() % (deg + 1));
      mo.e[1] = static_cast<int>(rng.next() % (deg - mo.e[0] + 1));
      mo.e[2] = deg - mo.e[0] - mo.e[1];
      poly.push_back(mo);
    }
    std::vector<double> x0{rng.uniform(-1, 1), rng.uniform(-1, 1),
                           rng.uniform(-1, 1)};
    std::vector<Jet> xs;
    for (int v = 0; v < 3; ++v) xs.push_back(Jet::variable(sp, v, x0[v]));
    Jet p = Jet::constant(sp, 0.0);
    for (const auto& mo : poly) {
      Jet term = Jet::constant(sp, mo.c);
      for (int v = 0; v < 3; ++v)
        for (int k = 0; k < mo.e[v]; ++k) term = term * xs[v];
      p += term;
    }
    // every coefficient equals the analytic derivative / factorials
    for (int idx = 0; idx < sp->size(); ++idx) {
      auto al = sp->exponents(idx);
      double expect = 0.0;
      for (const auto& mo : poly) {
        double c = mo.c;
        bool alive = true;
        for (int v = 0; v < 3 && alive; ++v) {
          int e = mo.e[v];
          if (al[v] > e) {
            alive = false;
            break;
          }
          for (int d = 0; d < al[v]; ++d) c *= e - d;
          c *= std::pow(x0[v], e - al[v]);
        }
        if (alive) expect += c;
      }
      expect /= sp->factorial_product(idx);
      CHECK(p.coefficient(idx) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("1000 random compositions match finite differences") {
  Xoshiro256pp rng(424242);
  auto sp = JetSpace::pure(3, 2);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto prog = testutil::RandomProgram::make(rng, 3, 6);
    std::vector<double> x0{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0),
                           rng.uniform(0.5, 2.0)};
    std::vector<Jet> xj;
    for (int v = 0; v < 3; ++v) xj.push_back(Jet::variable(sp, v, x0[v]));
    Jet out = prog.eval(xj);
    auto f = [&](const std::vector<double>& v) { return prog.eval(v); };
    CHECK(out.value() == doctest::Approx(f(x0)).epsilon(1e-12));
    for (int i = 0; i < 3; ++i) {
      const double fd = testutil::fd_first(f, x0, i);
      const double jv = out.first_partial(i);
      CHECK(std::abs(jv - fd) <= 1e-6 * std::max(1.0, std::abs(jv)));
      for (int j = i; j < 3; ++j) {
        // second differences need a wider step: at 1e-5 their rounding
        // noise alone is ~4e-6 of the function scale
        const double fd2 = testutil::fd_second(f, x0, i, j, 2e-4);
        const double jv2 = out.partial({i, j});
        CHECK(std::abs(jv2 - fd2) <=
              1e-6 * std::max({1.0, std::abs(jv2), std::abs(f(x0))}));
        ++checked;
      }
    }
  }
  CHECK(checked == 6000);
}

TEST_CASE("formal derivative and slices") {
  // f(x, y) with y as capped auxiliary block: f = (3 + y0) * x0^2 * x1
  auto sp = JetSpace::get({2, 1, 4, 1});
  Jet x0 = Jet::variable(sp, 0, 0.7);
  Jet x1 = Jet::variable(sp, 1, -0.4);
  Jet y0 = Jet::variable(sp, 2, 0.0);
  Jet f = (3.0 + y0) * x0 * x0 * x1;

  Jet df = derive(f, 0);  // d/dx0 = (3 + y0) * 2 x0 * x1
  CHECK(df.space()->config().total_order == 3);
  CHECK(df.value() == doctest::Approx(3.0 * 2 * 0.7 * -0.4).epsilon(1e-14));

  auto main3 = JetSpace::pure(2, 3);
  Jet slice = aux_slice(df, 0, main3);  // coefficient of y0: 2 x0 x1
  CHECK(slice.value() == doctest::Approx(2 * 0.7 * -0.4).epsilon(1e-14));
  CHECK(slice.first_partial(0) == doctest::Approx(2 * -0.4).epsilon(1e-14));

  Jet base = main_slice(df, main3);  // y0 = 0 part: 6 x0 x1
  CHECK(base.value() == doctest::Approx(6 * 0.7 * -0.4).epsilon(1e-14));

  auto main2 = JetSpace::pure(2, 2);
  CHECK_THROWS_AS(truncate_to(slice, JetSpace::get({3, 0, 2, 0})), Error);
  Jet t = truncate_to(slice, JetSpace::get({2, 0, 2, 0}));
  CHECK(t.value() == slice.value());
  CHECK(t.space() == main2);
}

TEST_CASE("solve_spd") {
  SUBCASE("identity") {
    Matrix<double> m(3, 0.0);
    for (int i = 0; i < 3; ++i) m(i, i) = 1.0;
    std::vector<double> rhs{1, 2, 3};
    auto x = solve_spd<double>(m, rhs);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == doctest::Approx(3.0));
  }
  SUBCASE("diagonal") {
    Matrix<double> m(2, 0.0);
    m(0, 0) = 2.0;
    m(1, 1) = 4.0;
    std::vector<double> rhs{2, 4};
    auto x = solve_spd<double>(m, rhs);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
  }
  SUBCASE("random SPD with known solution") {
    Xoshiro256pp rng(7);
    for (int n = 2; n <= 6; ++n) {
      Matrix<double> a(n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
      Matrix<double> m(n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) m(i, j) += a(k, i) * a(k, j);
          if (i == j) m(i, j) += 0.5;
        }
      std::vector<double> ones(n, 1.0), rhs(n, 0.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rhs[i] += m(i, j) * ones[j];
      auto x = solve_spd<double>(m, rhs);
      for (int i = 0; i < n; ++i)
        CHECK(std::abs(x[i] - 1.0) < (n == 4 ? 1e-12 : 1e-11));
    }
  }
  SUBCASE("indefinite matrix throws") {
    Matrix<double> m(2, 0.0);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    std::vector<double> rhs{1, 1};
    CHECK_THROWS_AS(solve_spd<double>(m, rhs), NumericError);
  }
  SUBCASE("jet-valued solve") {
    auto sp = JetSpace::pure(2, 2);
    Jet t = Jet::variable(sp, 0, 0.3);
    Matrix<Jet> m(2, Jet::constant(sp, 0.0));
    m(0, 0) = 2.0 + t * t;
    m(0, 1) = t;
    m(1, 0) = t;
    m(1, 1) = Jet::constant(sp, 3.0);
    std::vector<Jet> rhs{Jet::constant(sp, 1.0), Jet::constant(sp, 2.0)};
    auto x = solve_spd<Jet>(m, rhs);
    // residual m*x - rhs vanishes as a jet
    for (int i = 0; i < 2; ++i) {
      Jet r = -rhs[i];
      for (int j = 0; j < 2; ++j) r += m(i, j) * x[j];
      for (int k = 0; k < r.space()->size(); ++k)
        CHECK(std::abs(r.coefficient(k)) < 1e-13);
    }
  }
}

TEST_CASE("jacobi eigenvalues") {
  Matrix<double> m(3, 0.0);
  m(0, 0) = 2;
  m(1, 1) = 5;
  m(2, 2) = 9;
  m(0, 1) = m(1, 0) = 1;
  auto ev = sym_eigenvalues(m);
  // characteristic roots of [[2,1,0],[1,5,0],[0,0,9]]
  const double d = std::sqrt(9.0 + 4.0) / 2.0;
  CHECK(ev[0] == doctest::Approx(3.5 - d).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(3.5 + d).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(9.0).epsilon(1e-12));
}
