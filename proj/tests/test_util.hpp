// SPDX-License-Identifier: Apache-2.0
//
// Shared test oracles: central finite differences and a replayable random
// expression generator.  These stay independent of the jet implementation
// they check.

#ifndef FINSLER_TEST_UTIL_HPP
#define FINSLER_TEST_UTIL_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "finsler/rng.hpp"

namespace testutil {

using ScalarFn = std::function<double(const std::vector<double>&)>;

inline double fd_first(const ScalarFn& f, std::vector<double> x, int i,
                       double h = 1e-5) {
  x[i] += h;
  const double fp = f(x);
  x[i] -= 2 * h;
  const double fm = f(x);
  return (fp - fm) / (2 * h);
}

inline double fd_second(const ScalarFn& f, std::vector<double> x, int i,
                        int j, double h = 1e-5) {
  if (i == j) {
    const double f0 = f(x);
    x[i] += h;
    const double fp = f(x);
    x[i] -= 2 * h;
    const double fm = f(x);
    return (fp - 2 * f0 + fm) / (h * h);
  }
  auto at = [&](double di, double dj) {
    std::vector<double> y = x;
    y[i] += di;
    y[j] += dj;
    return f(y);
  };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}

/// A random straight-line program over ops whose domains cover all reals,
/// so the same program can be replayed on doubles (for FD oracles) and on
/// jets.
struct RandomProgram {
  struct Op {
    int kind;  // 0 add, 1 sub, 2 mul, 3 shifted div, 4 sqrt, 5 exp, 6 log, 7 pow
    int a, b;
  };
  int n_inputs;
  std::vector<Op> ops;

  static RandomProgram make(finsler::Xoshiro256pp& rng, int n_inputs,
                            int n_ops) {
    RandomProgram p;
    p.n_inputs = n_inputs;
    for (int k = 0; k < n_ops; ++k) {
      const int slots = n_inputs + k;
      Op op;
      op.kind = static_cast<int>(rng.next() % 8);
      op.a = static_cast<int>(rng.next() % slots);
      op.b = static_cast<int>(rng.next() % slots);
      p.ops.push_back(op);
    }
    return p;
  }

  template <typename T>
  T eval(const std::vector<T>& inputs) const {
    std::vector<T> v = inputs;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sqrt;
    for (const auto& op : ops) {
      const T& a = v[op.a];
      const T& b = v[op.b];
      switch (op.kind) {
        case 0: v.push_back(a + b); break;
        case 1: v.push_back(a - b); break;
        case 2: v.push_back(a * b); break;
        case 3: v.push_back(a / (1.5 + b * b)); break;
        case 4: v.push_back(sqrt(0.5 + a * a)); break;
        case 5: v.push_back(exp(a * 0.25)); break;
        case 6: v.push_back(log(1.2 + a * a)); break;
        default: v.push_back(pow(1.3 + a * a, 0.7)); break;
      }
    }
    return v.back();
  }
};

}  // namespace testutil

#endif
