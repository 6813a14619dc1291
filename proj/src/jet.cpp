// SPDX-License-Identifier: Apache-2.0

#include "finsler/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

struct ConfigKey {
  int a, b, c, d;
  bool operator<(const ConfigKey& o) const {
    return std::tie(a, b, c, d) < std::tie(o.a, o.b, o.c, o.d);
  }
};

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<ConfigKey, std::shared_ptr<const JetSpace>>& registry() {
  static std::map<ConfigKey, std::shared_ptr<const JetSpace>> r;
  return r;
}

void enumerate(int n_vars, int n_main, int total_order, int aux_cap,
               std::vector<std::uint8_t>& cur, int var, int used_total,
               int used_aux, std::vector<std::vector<std::uint8_t>>& out) {
  if (var == n_vars) {
    out.push_back(cur);
    return;
  }
  const int budget = var >= n_main
                         ? std::min(total_order - used_total,
                                    aux_cap - used_aux)
                         : total_order - used_total;
  for (int e = 0; e <= budget; ++e) {
    cur[var] = static_cast<std::uint8_t>(e);
    enumerate(n_vars, n_main, total_order, aux_cap, cur, var + 1,
              used_total + e, used_aux + (var >= n_main ? e : 0), out);
  }
  cur[var] = 0;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

std::uint64_t JetSpace::pack(std::span<const std::uint8_t> exps) {
  std::uint64_t key = 0;
  for (std::size_t v = 0; v < exps.size(); ++v)
    key |= static_cast<std::uint64_t>(exps[v] & 0xF) << (4 * v);
  return key;
}

std::shared_ptr<const JetSpace> JetSpace::get(const JetSpaceConfig& cfg) {
  if (cfg.n_main < 0 || cfg.n_aux < 0 || cfg.n_main + cfg.n_aux > 16)
    throw Error("jet space supports at most 16 directions");
  if (cfg.total_order < 0 || cfg.total_order > 15 || cfg.aux_cap < 0)
    throw Error("jet space truncation order out of range");
  const ConfigKey key{cfg.n_main, cfg.n_aux, cfg.total_order, cfg.aux_cap};
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = registry().find(key);
    if (it != registry().end()) return it->second;
  }
  // Construct outside the lock: building a space recursively interns its
  // derivative space.
  std::shared_ptr<const JetSpace> fresh(new JetSpace(cfg));
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto [it, inserted] = registry().emplace(key, fresh);
  return it->second;
}

std::shared_ptr<const JetSpace> JetSpace::pure(int n_main, int order) {
  return get({n_main, 0, order, 0});
}

JetSpace::JetSpace(const JetSpaceConfig& cfg) : cfg_(cfg) {
  const int nv = n_vars();
  std::vector<std::vector<std::uint8_t>> indices;
  std::vector<std::uint8_t> cur(static_cast<std::size_t>(nv), 0);
  enumerate(nv, cfg.n_main, cfg.total_order, cfg.aux_cap, cur, 0, 0, 0,
            indices);
  std::stable_sort(indices.begin(), indices.end(),
                   [](const auto& a, const auto& b) {
                     int da = 0, db = 0;
                     for (auto e : a) da += e;
                     for (auto e : b) db += e;
                     if (da != db) return da < db;
                     return a < b;
                   });
  size_ = static_cast<int>(indices.size());
  exps_.resize(static_cast<std::size_t>(size_) * nv);
  degree_.resize(size_);
  fact_.resize(size_);
  for (int i = 0; i < size_; ++i) {
    int deg = 0;
    double f = 1.0;
    for (int v = 0; v < nv; ++v) {
      const std::uint8_t e = indices[i][v];
      exps_[static_cast<std::size_t>(i) * nv + v] = e;
      deg += e;
      f *= factorial(e);
    }
    degree_[i] = static_cast<std::uint8_t>(deg);
    fact_[i] = f;
    lookup_.emplace(pack(exponents(i)), i);
  }
  unit_.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    std::vector<std::uint8_t> e(static_cast<std::size_t>(nv), 0);
    e[v] = 1;
    unit_[v] = index_of(e);
  }

  // Multiplication table, grouped by output coefficient in graded order
  // with (0,k) first and (k,0) last inside each group.
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> groups(
      size_);
  std::vector<std::uint8_t> sum(static_cast<std::size_t>(nv));
  for (int i = 0; i < size_; ++i) {
    for (int j = 0; j < size_; ++j) {
      if (degree_[i] + degree_[j] > cfg.total_order) continue;
      bool ok = true;
      int aux_sum = 0;
      for (int v = 0; v < nv; ++v) {
        sum[v] = static_cast<std::uint8_t>(
            exps_[static_cast<std::size_t>(i) * nv + v] +
            exps_[static_cast<std::size_t>(j) * nv + v]);
        if (v >= cfg.n_main) aux_sum += sum[v];
      }
      if (aux_sum > cfg.aux_cap) ok = false;
      if (!ok) continue;
      const int k = index_of(sum);
      if (k >= 0) groups[k].emplace_back(i, j);
    }
  }
  conv_.offsets.reserve(size_ + 1);
  conv_.offsets.push_back(0);
  for (int k = 0; k < size_; ++k) {
    auto& g = groups[k];
    std::sort(g.begin(), g.end(),
              [k](const std::pair<std::int32_t, std::int32_t>& a,
                  const std::pair<std::int32_t, std::int32_t>& b) {
                auto rank = [k](const std::pair<std::int32_t, std::int32_t>&
                                    p) {
                  if (p.first == 0 && p.second == k) return 0;
                  if (p.first == k && p.second == 0) return 2;
                  return 1;
                };
                if (rank(a) != rank(b)) return rank(a) < rank(b);
                return a < b;
              });
    for (const auto& [i, j] : g) {
      conv_.left.push_back(i);
      conv_.right.push_back(j);
    }
    conv_.offsets.push_back(static_cast<std::int32_t>(conv_.left.size()));
  }

  // Formal-derivative maps for main directions.
  if (cfg.total_order >= 1) {
    JetSpaceConfig dcfg = cfg;
    dcfg.total_order = cfg.total_order - 1;
    dcfg.aux_cap = std::min(cfg.aux_cap, dcfg.total_order);
    deriv_space_ = get(dcfg);
    deriv_.resize(cfg.n_main);
    std::vector<std::uint8_t> e(static_cast<std::size_t>(nv));
    for (int v = 0; v < cfg.n_main; ++v) {
      for (int i = 0; i < size_; ++i) {
        auto src = exponents(i);
        if (src[v] == 0) continue;
        std::copy(src.begin(), src.end(), e.begin());
        e[v] -= 1;
        const int dst = deriv_space_->index_of(e);
        if (dst >= 0)
          deriv_[v].push_back({i, dst, static_cast<double>(src[v])});
      }
    }
  }
}

int JetSpace::index_of(std::span<const std::uint8_t> exps) const {
  auto it = lookup_.find(pack(exps));
  return it == lookup_.end() ? -1 : it->second;
}

const std::vector<JetSpace::DerivEntry>& JetSpace::deriv_map(int var) const {
  if (!deriv_space_ || var < 0 || var >= cfg_.n_main)
    throw Error("no derivative map for direction " + std::to_string(var) +
                " in " + describe());
  return deriv_[var];
}

std::string JetSpace::describe() const {
  std::ostringstream os;
  os << "JetSpace(main=" << cfg_.n_main << ", aux=" << cfg_.n_aux
     << ", order=" << cfg_.total_order << ", aux_cap=" << cfg_.aux_cap << ")";
  return os.str();
}

Jet Jet::constant(JetSpacePtr space, double v) {
  std::vector<double> c(static_cast<std::size_t>(space->size()), 0.0);
  c[0] = v;
  return Jet(std::move(space), std::move(c));
}

Jet Jet::variable(JetSpacePtr space, int var, double v) {
  if (var < 0 || var >= space->n_vars())
    throw Error("jet direction index out of range");
  std::vector<double> c(static_cast<std::size_t>(space->size()), 0.0);
  c[0] = v;
  const int u = space->unit_index(var);
  if (u >= 0) c[u] = 1.0;  // truncated away at order 0 / aux_cap 0
  return Jet(std::move(space), std::move(c));
}

Jet Jet::from_coefficients(JetSpacePtr space, std::vector<double> c) {
  if (static_cast<int>(c.size()) != space->size())
    throw Error("coefficient count does not match jet space size");
  return Jet(std::move(space), std::move(c));
}

void Jet::check_same_space(const Jet& o) const {
  if (space_ != o.space_)
    throw Error("jet operands from different truncations: " +
                space_->describe() + " vs " + o.space_->describe());
}

double Jet::coefficient(std::span<const std::uint8_t> exps) const {
  const int idx = space_->index_of(exps);
  if (idx < 0) throw Error("coefficient outside truncation in " +
                           space_->describe());
  return c_[idx];
}

double Jet::first_partial(int var) const {
  const int u = space_->unit_index(var);
  if (u < 0) throw Error("first partial outside truncation");
  return c_[u];
}

double Jet::second_partial(int v, int w) const { return partial({v, w}); }

double Jet::partial(std::initializer_list<int> vars) const {
  std::vector<std::uint8_t> e(static_cast<std::size_t>(space_->n_vars()), 0);
  for (int v : vars) {
    if (v < 0 || v >= space_->n_vars())
      throw Error("jet direction index out of range");
    e[v] += 1;
  }
  const int idx = space_->index_of(e);
  if (idx < 0) throw Error("partial outside truncation in " +
                           space_->describe());
  return c_[idx] * space_->factorial_product(idx);
}

Jet& Jet::operator+=(const Jet& o) {
  check_same_space(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_same_space(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double v) {
  for (double& x : c_) x *= v;
  return *this;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& x : r.c_) x = -x;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.check_same_space(b);
  std::vector<double> out(a.c_.size());
  kernels::conv_mul(a.space_->conv_table(), a.c_.data(), b.c_.data(),
                    out.data());
  return Jet(a.space_, std::move(out));
}

Jet operator/(const Jet& a, const Jet& b) {
  a.check_same_space(b);
  if (b.value() == 0.0)
    throw DomainViolation("division by a jet with zero value");
  std::vector<double> out(a.c_.size());
  kernels::conv_div(a.space_->conv_table(), a.c_.data(), b.c_.data(),
                    out.data());
  return Jet(a.space_, std::move(out));
}

Jet& Jet::operator/=(const Jet& o) {
  check_same_space(o);
  if (o.value() == 0.0)
    throw DomainViolation("division by a jet with zero value");
  kernels::conv_div(space_->conv_table(), c_.data(), o.c_.data(), c_.data());
  return *this;
}

Jet operator/(double v, const Jet& a) {
  return Jet::constant(a.space(), v) / a;
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0))
    throw DomainViolation("sqrt of a jet with non-positive value " +
                          std::to_string(a.value()));
  std::vector<double> out(a.c_.size());
  kernels::conv_sqrt(a.space_->conv_table(), a.c_.data(), out.data());
  return Jet(a.space_, std::move(out));
}

Jet taylor_compose(const Jet& a, std::span<const double> series) {
  Jet z = a;
  z.c_[0] = 0.0;
  const int p = static_cast<int>(series.size()) - 1;
  Jet r = Jet::constant(a.space_, series[p]);
  for (int k = p - 1; k >= 0; --k) {
    r = r * z;
    r += series[k];
  }
  return r;
}

Jet exp(const Jet& a) {
  const int p = a.space()->config().total_order;
  std::vector<double> series(static_cast<std::size_t>(p) + 1);
  const double e0 = std::exp(a.value());
  double f = 1.0;
  for (int k = 0; k <= p; ++k) {
    if (k > 0) f *= k;
    series[k] = e0 / f;
  }
  return taylor_compose(a, series);
}

Jet log(const Jet& a) {
  if (!(a.value() > 0.0))
    throw DomainViolation("log of a jet with non-positive value " +
                          std::to_string(a.value()));
  const int p = a.space()->config().total_order;
  std::vector<double> series(static_cast<std::size_t>(p) + 1);
  series[0] = std::log(a.value());
  double ipow = 1.0 / a.value();
  for (int k = 1; k <= p; ++k) {
    series[k] = (k % 2 ? 1.0 : -1.0) * ipow / k;
    ipow /= a.value();
  }
  return taylor_compose(a, series);
}

Jet pow(const Jet& a, double r) {
  const double ri = std::nearbyint(r);
  if (ri == r && std::abs(r) <= 12) {
    // Integer exponents stay exact for any nonzero base.
    int n = static_cast<int>(std::abs(ri));
    Jet acc = Jet::constant(a.space(), 1.0);
    for (int k = 0; k < n; ++k) acc = acc * a;
    if (ri < 0) return 1.0 / acc;
    return acc;
  }
  if (!(a.value() > 0.0))
    throw DomainViolation(
        "pow with non-integer exponent requires a positive value, got " +
        std::to_string(a.value()));
  const int p = a.space()->config().total_order;
  std::vector<double> series(static_cast<std::size_t>(p) + 1);
  double coeff = std::pow(a.value(), r);
  series[0] = coeff;
  for (int k = 1; k <= p; ++k) {
    coeff *= (r - (k - 1)) / k / a.value();
    series[k] = coeff;
  }
  return taylor_compose(a, series);
}

Jet derive(const Jet& a, int var) {
  const auto& target = a.space()->deriv_space();
  const auto& map = a.space()->deriv_map(var);
  std::vector<double> c(static_cast<std::size_t>(target->size()), 0.0);
  for (const auto& e : map) c[e.dst] = a.coefficient(e.src) * e.factor;
  return Jet::from_coefficients(target, std::move(c));
}

Jet truncate_to(const Jet& a, const JetSpacePtr& target) {
  const auto& sc = a.space()->config();
  const auto& tc = target->config();
  if (tc.n_main != sc.n_main || tc.n_aux != sc.n_aux)
    throw Error("truncate_to requires matching direction blocks");
  std::vector<double> c(static_cast<std::size_t>(target->size()), 0.0);
  for (int i = 0; i < target->size(); ++i) {
    const int src = a.space()->index_of(target->exponents(i));
    if (src >= 0) c[i] = a.coefficient(src);
  }
  return Jet::from_coefficients(target, std::move(c));
}

namespace {

Jet slice_impl(const Jet& a, int aux_var, const JetSpacePtr& target) {
  const auto& sc = a.space()->config();
  const auto& tc = target->config();
  if (tc.n_main != sc.n_main || tc.n_aux != 0)
    throw Error("slice target must be the pure-main space");
  const int nv = sc.n_main + sc.n_aux;
  std::vector<std::uint8_t> e(static_cast<std::size_t>(nv), 0);
  std::vector<double> c(static_cast<std::size_t>(target->size()), 0.0);
  for (int i = 0; i < target->size(); ++i) {
    auto te = target->exponents(i);
    std::fill(e.begin(), e.end(), 0);
    std::copy(te.begin(), te.end(), e.begin());
    if (aux_var >= 0) e[static_cast<std::size_t>(sc.n_main + aux_var)] = 1;
    const int src = a.space()->index_of(e);
    if (src >= 0) c[i] = a.coefficient(src);
  }
  return Jet::from_coefficients(target, std::move(c));
}

}  // namespace

Jet aux_slice(const Jet& a, int aux_var, const JetSpacePtr& target) {
  if (aux_var < 0 || aux_var >= a.space()->config().n_aux)
    throw Error("aux_slice direction out of range");
  return slice_impl(a, aux_var, target);
}

Jet main_slice(const Jet& a, const JetSpacePtr& target) {
  return slice_impl(a, -1, target);
}

}  // namespace finsler
