// SPDX-License-Identifier: Apache-2.0
//
// Scalar vs AVX2 kernel equivalence on real convolution tables.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "finsler/errors.hpp"
#include "finsler/jet.hpp"
#include "finsler/jet_kernels.hpp"
#include "finsler/rng.hpp"

using namespace finsler;

namespace {

struct ModeGuard {
  ~ModeGuard() { kernels::set_mode(kernels::Mode::Auto); }
};

std::vector<double> random_coeffs(Xoshiro256pp& rng, int n,
                                  double lead = 2.0) {
  std::vector<double> c(n);
  for (auto& v : c) v = rng.uniform(-1.0, 1.0);
  c[0] = lead;
  return c;
}

}  // namespace

TEST_CASE("dot kernels agree pairwise") {
  if (!kernels::avx2_available()) {
    MESSAGE("avx2 not available; skipping equivalence");
    return;
  }
  Xoshiro256pp rng(99);
  auto sp = JetSpace::get({3, 3, 6, 1});
  const auto& t = sp->conv_table();
  std::vector<double> a = random_coeffs(rng, sp->size());
  std::vector<double> b = random_coeffs(rng, sp->size());
  for (int k = 0; k < t.group_count(); ++k) {
    const auto off = t.offsets[k];
    const auto len = t.offsets[k + 1] - off;
    const double s = kernels::dot_scalar(a.data(), b.data(),
                                         t.left.data() + off,
                                         t.right.data() + off, len);
    const double v = kernels::dot_avx2(a.data(), b.data(),
                                       t.left.data() + off,
                                       t.right.data() + off, len);
    CHECK(std::abs(s - v) <= 1e-13 * std::max(1.0, std::abs(s)));
  }
}

TEST_CASE("mul/div/sqrt equivalence across kernel modes") {
  if (!kernels::avx2_available()) {
    MESSAGE("avx2 not available; skipping equivalence");
    return;
  }
  ModeGuard guard;
  Xoshiro256pp rng(1234);
  auto sp = JetSpace::get({4, 0, 6, 0});
  for (int trial = 0; trial < 10; ++trial) {
    auto ca = random_coeffs(rng, sp->size(), rng.uniform(1.0, 3.0));
    auto cb = random_coeffs(rng, sp->size(), rng.uniform(1.0, 3.0));
    Jet a = Jet::from_coefficients(sp, ca);
    Jet b = Jet::from_coefficients(sp, cb);

    kernels::set_mode(kernels::Mode::Scalar);
    Jet m_s = a * b, d_s = a / b, r_s = sqrt(a);
    kernels::set_mode(kernels::Mode::Avx2);
    Jet m_v = a * b, d_v = a / b, r_v = sqrt(a);

    for (int k = 0; k < sp->size(); ++k) {
      CHECK(std::abs(m_s.coefficient(k) - m_v.coefficient(k)) <=
            1e-13 * std::max(1.0, std::abs(m_s.coefficient(k))));
      CHECK(std::abs(d_s.coefficient(k) - d_v.coefficient(k)) <=
            1e-12 * std::max(1.0, std::abs(d_s.coefficient(k))));
      CHECK(std::abs(r_s.coefficient(k) - r_v.coefficient(k)) <=
            1e-13 * std::max(1.0, std::abs(r_s.coefficient(k))));
    }
  }
}

TEST_CASE("division and sqrt invert multiplication") {
  Xoshiro256pp rng(5150);
  auto sp = JetSpace::get({3, 2, 5, 1});
  for (int trial = 0; trial < 50; ++trial) {
    auto ca = random_coeffs(rng, sp->size(), rng.uniform(0.5, 2.0));
    auto cb = random_coeffs(rng, sp->size(), rng.uniform(0.5, 2.0));
    Jet a = Jet::from_coefficients(sp, ca);
    Jet b = Jet::from_coefficients(sp, cb);
    Jet q = (a * b) / b;
    Jet s = sqrt(a * a);  // a[0] > 0 so sqrt returns a
    for (int k = 0; k < sp->size(); ++k) {
      CHECK(std::abs(q.coefficient(k) - a.coefficient(k)) < 1e-11);
      CHECK(std::abs(s.coefficient(k) - a.coefficient(k)) < 1e-11);
    }
  }
}

TEST_CASE("mode selection is sticky and deterministic") {
  ModeGuard guard;
  kernels::set_mode(kernels::Mode::Scalar);
  CHECK(std::string(kernels::active_name()) == "scalar");
  kernels::set_mode(kernels::Mode::Auto);
  const std::string name = kernels::active_name();
  CHECK((name == "scalar" || name == "avx2"));
  if (kernels::avx2_available()) CHECK(name == "avx2");

  auto sp = JetSpace::pure(2, 4);
  Jet x = Jet::variable(sp, 0, 1.1);
  Jet y = Jet::variable(sp, 1, 0.4);
  Jet f1 = exp(x * y) / sqrt(1.0 + x * x);
  Jet f2 = exp(x * y) / sqrt(1.0 + x * x);
  for (int k = 0; k < sp->size(); ++k)
    CHECK(f1.coefficient(k) == f2.coefficient(k));  // bitwise repeatable
}
