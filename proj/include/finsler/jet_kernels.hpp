// SPDX-License-Identifier: Apache-2.0
//
// Inner kernels of the truncated-Taylor algebra.
//
// Every jet product/quotient/sqrt reduces to sums of a[l]*b[r] over a
// precomputed pair table grouped by output coefficient.  That gathered
// dot product is the one data-parallel hot loop of the library; it has a
// scalar reference implementation and an AVX2+FMA variant selected at
// runtime.  The two are equivalence-tested against each other.

#ifndef FINSLER_JET_KERNELS_HPP
#define FINSLER_JET_KERNELS_HPP

#include <cstdint>
#include <vector>

namespace finsler::kernels {

/// Pair table of a truncated polynomial algebra: for output coefficient k,
/// the ordered pairs (left[p], right[p]) with p in [offsets[k], offsets[k+1])
/// enumerate every product a[left]*b[right] landing on k.
///
/// Group layout invariants (relied on by conv_div / conv_sqrt):
///   - groups appear in ascending total degree of k;
///   - within group k > 0, the pair (0, k) is first and (k, 0) is last.
struct ConvTable {
  std::vector<std::int32_t> offsets;
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;

  std::int32_t group_count() const {
    return static_cast<std::int32_t>(offsets.size()) - 1;
  }
};

using DotFn = double (*)(const double* a, const double* b,
                         const std::int32_t* li, const std::int32_t* ri,
                         std::int64_t n);

enum class Mode { Auto, Scalar, Avx2 };

double dot_scalar(const double* a, const double* b, const std::int32_t* li,
                  const std::int32_t* ri, std::int64_t n);
#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* a, const double* b, const std::int32_t* li,
                const std::int32_t* ri, std::int64_t n);
#endif

bool avx2_available();

/// Select the kernel variant; Auto resolves from CPUID once.
/// Throws finsler::ConfigError when forcing an unavailable variant.
void set_mode(Mode mode);
Mode requested_mode();

/// Kernel actually in use ("scalar" or "avx2"); stable for a process
/// lifetime unless set_mode intervenes.
const char* active_name();
DotFn active_dot();

/// out = a * b (truncated convolution). out must not alias a or b.
void conv_mul(const ConvTable& t, const double* a, const double* b,
              double* out);

/// out = a / b; requires b[0] != 0 (checked by the caller).
/// Processes groups in degree order; out may alias a, never b.
void conv_div(const ConvTable& t, const double* a, const double* b,
              double* out);

/// out = sqrt(a); requires a[0] > 0 (checked by the caller).
/// out may alias a.
void conv_sqrt(const ConvTable& t, const double* a, double* out);

}  // namespace finsler::kernels

#endif
