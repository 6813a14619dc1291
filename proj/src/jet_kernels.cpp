// SPDX-License-Identifier: Apache-2.0

#include "finsler/jet_kernels.hpp"

#include <atomic>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler::kernels {

double dot_scalar(const double* a, const double* b, const std::int32_t* li,
                  const std::int32_t* ri, std::int64_t n) {
  double s = 0.0;
  for (std::int64_t p = 0; p < n; ++p) s += a[li[p]] * b[ri[p]];
  return s;
}

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

std::atomic<Mode> g_mode{Mode::Auto};

DotFn resolve(Mode m) {
#if defined(__x86_64__) || defined(_M_X64)
  if (m == Mode::Avx2) return &dot_avx2;
  if (m == Mode::Auto && avx2_available()) return &dot_avx2;
#endif
  return &dot_scalar;
}

std::atomic<DotFn> g_dot{nullptr};

}  // namespace

void set_mode(Mode mode) {
  if (mode == Mode::Avx2 && !avx2_available())
    throw ConfigError("kernel 'avx2' requested but not supported on this CPU");
  g_mode.store(mode);
  g_dot.store(resolve(mode));
}

Mode requested_mode() { return g_mode.load(); }

DotFn active_dot() {
  DotFn f = g_dot.load();
  if (!f) {
    f = resolve(g_mode.load());
    g_dot.store(f);
  }
  return f;
}

const char* active_name() {
  return active_dot() == &dot_scalar ? "scalar" : "avx2";
}

void conv_mul(const ConvTable& t, const double* a, const double* b,
              double* out) {
  const DotFn dot = active_dot();
  const std::int32_t ng = t.group_count();
  const std::int32_t* li = t.left.data();
  const std::int32_t* ri = t.right.data();
  for (std::int32_t k = 0; k < ng; ++k) {
    const std::int32_t off = t.offsets[k];
    out[k] = dot(a, b, li + off, ri + off, t.offsets[k + 1] - off);
  }
}

void conv_div(const ConvTable& t, const double* a, const double* b,
              double* out) {
  const DotFn dot = active_dot();
  const double b0 = b[0];
  const std::int32_t ng = t.group_count();
  const std::int32_t* li = t.left.data();
  const std::int32_t* ri = t.right.data();
  out[0] = a[0] / b0;
  // Group k's last pair is (k, 0); the remaining pairs reference only
  // lower-degree quotient coefficients, already final.
  for (std::int32_t k = 1; k < ng; ++k) {
    const std::int32_t off = t.offsets[k];
    const std::int64_t len = t.offsets[k + 1] - off;
    const double s = dot(out, b, li + off, ri + off, len - 1);
    out[k] = (a[k] - s) / b0;
  }
}

void conv_sqrt(const ConvTable& t, const double* a, double* out) {
  const DotFn dot = active_dot();
  const std::int32_t ng = t.group_count();
  const std::int32_t* li = t.left.data();
  const std::int32_t* ri = t.right.data();
  const double r0 = std::sqrt(a[0]);
  const double inv = 1.0 / (2.0 * r0);
  out[0] = r0;
  // Skip the boundary pairs (0,k) and (k,0): together they contribute
  // 2*out[0]*out[k], the unknown being solved for.
  for (std::int32_t k = 1; k < ng; ++k) {
    const std::int32_t off = t.offsets[k];
    const std::int64_t len = t.offsets[k + 1] - off;
    const double s = dot(out, out, li + off + 1, ri + off + 1, len - 2);
    out[k] = (a[k] - s) * inv;
  }
}

}  // namespace finsler::kernels
