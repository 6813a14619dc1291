// SPDX-License-Identifier: Apache-2.0
//
// Truncated multivariate Taylor values ("jets").
//
// A Jet carries the Taylor coefficients (derivative / prod k!) of a scalar
// quantity with respect to a fixed set of seeded directions, truncated at
// a total order chosen at construction time.  Directions split into a main
// block and an optional auxiliary block whose total degree is capped
// separately (the spray pipeline seeds velocities as main directions and
// base-point coordinates as degree-1 auxiliaries).  Arithmetic is exact on
// polynomials that fit the truncation; operands must share a space, and
// mixing truncations is an error rather than a silent promotion.

#ifndef FINSLER_JET_HPP
#define FINSLER_JET_HPP

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "finsler/jet_kernels.hpp"

namespace finsler {

struct JetSpaceConfig {
  int n_main = 1;
  int n_aux = 0;
  int total_order = 1;
  int aux_cap = 0;

  bool operator==(const JetSpaceConfig&) const = default;
};

/// Shared descriptor of one truncated polynomial algebra: the admissible
/// multi-indices in graded order, the multiplication pair table, and the
/// formal-derivative maps.  Instances are interned, so pointer equality
/// decides whether two jets live in the same algebra.
class JetSpace {
 public:
  static std::shared_ptr<const JetSpace> get(const JetSpaceConfig& cfg);
  static std::shared_ptr<const JetSpace> pure(int n_main, int order);

  int size() const { return size_; }
  int n_vars() const { return cfg_.n_main + cfg_.n_aux; }
  const JetSpaceConfig& config() const { return cfg_; }

  std::span<const std::uint8_t> exponents(int idx) const {
    return {exps_.data() + static_cast<std::size_t>(idx) * n_vars(),
            static_cast<std::size_t>(n_vars())};
  }
  int total_degree(int idx) const { return degree_[idx]; }
  /// Position of the multi-index, or -1 when it lies outside the truncation.
  int index_of(std::span<const std::uint8_t> exps) const;
  /// Position of the linear coefficient of `var`, or -1 when truncated away.
  int unit_index(int var) const { return unit_[var]; }
  /// prod_v (alpha_v!) for converting Taylor coefficients to derivatives.
  double factorial_product(int idx) const { return fact_[idx]; }

  const kernels::ConvTable& conv_table() const { return conv_; }

  struct DerivEntry {
    std::int32_t src, dst;
    double factor;
  };
  const std::shared_ptr<const JetSpace>& deriv_space() const {
    return deriv_space_;
  }
  const std::vector<DerivEntry>& deriv_map(int var) const;

  std::string describe() const;

 private:
  explicit JetSpace(const JetSpaceConfig& cfg);

  static std::uint64_t pack(std::span<const std::uint8_t> exps);

  JetSpaceConfig cfg_;
  int size_ = 0;
  std::vector<std::uint8_t> exps_;
  std::vector<std::uint8_t> degree_;
  std::vector<double> fact_;
  std::vector<int> unit_;
  std::unordered_map<std::uint64_t, std::int32_t> lookup_;
  kernels::ConvTable conv_;
  std::shared_ptr<const JetSpace> deriv_space_;
  std::vector<std::vector<DerivEntry>> deriv_;
};

using JetSpacePtr = std::shared_ptr<const JetSpace>;

class Jet {
 public:
  Jet() = default;

  static Jet constant(JetSpacePtr space, double v);
  /// The coordinate function t -> v + t_var.
  static Jet variable(JetSpacePtr space, int var, double v);
  static Jet from_coefficients(JetSpacePtr space, std::vector<double> c);

  const JetSpacePtr& space() const { return space_; }
  bool valid() const { return static_cast<bool>(space_); }

  double value() const { return c_[0]; }
  std::span<const double> coefficients() const { return c_; }
  double coefficient(int idx) const { return c_[idx]; }
  /// Taylor coefficient of a multi-index; throws if outside the truncation.
  double coefficient(std::span<const std::uint8_t> exps) const;

  /// Derivative values (coefficient times factorials).
  double first_partial(int var) const;
  double second_partial(int v, int w) const;
  /// vars lists one entry per differentiation, e.g. {0,0,1} = d^3/dt0^2 dt1.
  double partial(std::initializer_list<int> vars) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double v) {
    c_[0] += v;
    return *this;
  }
  Jet& operator-=(double v) {
    c_[0] -= v;
    return *this;
  }
  Jet& operator*=(double v);
  Jet& operator/=(double v) { return *this *= 1.0 / v; }

  Jet operator-() const;

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator+(Jet a, double v) { return a += v; }
  friend Jet operator+(double v, Jet a) { return a += v; }
  friend Jet operator-(Jet a, double v) { return a -= v; }
  friend Jet operator-(double v, const Jet& a) { return -a + v; }
  friend Jet operator*(Jet a, double v) { return a *= v; }
  friend Jet operator*(double v, Jet a) { return a *= v; }
  friend Jet operator/(Jet a, double v) { return a *= 1.0 / v; }
  friend Jet operator/(double v, const Jet& a);

  friend Jet sqrt(const Jet& a);
  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet pow(const Jet& a, double r);

  /// sum_k series[k] * (a - a.value())^k; series holds Taylor coefficients
  /// of the outer function at a.value().
  friend Jet taylor_compose(const Jet& a, std::span<const double> series);

 private:
  Jet(JetSpacePtr space, std::vector<double> c)
      : space_(std::move(space)), c_(std::move(c)) {}

  void check_same_space(const Jet& o) const;

  JetSpacePtr space_;
  std::vector<double> c_;
};

/// Formal d/dt_var of the truncated polynomial; lands one order lower.
/// Only main-block directions may be differentiated.
Jet derive(const Jet& a, int var);

/// Copy into a coarser truncation over the same direction blocks.
Jet truncate_to(const Jet& a, const JetSpacePtr& target);

/// Coefficient slice with auxiliary degree exactly e_{aux_var}, as a jet of
/// the pure-main target space (= the first aux derivative as a main-jet).
Jet aux_slice(const Jet& a, int aux_var, const JetSpacePtr& target);

/// Auxiliary-degree-zero part as a jet of the pure-main target space.
Jet main_slice(const Jet& a, const JetSpacePtr& target);

}  // namespace finsler

#endif
