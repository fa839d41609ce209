/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <numbers>

#include "aemos/simd/kernels.hpp"
#include "erfcx_coeffs.hpp"

namespace aemos::simd {

namespace {

constexpr std::size_t kLanes = 4;

void distances_avx2(double x0, double y0, const double* xs, const double* ys, std::size_t n,
                    double* out) {
  const __m256d vx0 = _mm256_set1_pd(x0);
  const __m256d vy0 = _mm256_set1_pd(y0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d dx = _mm256_sub_pd(vx0, _mm256_loadu_pd(xs + i));
    const __m256d dy = _mm256_sub_pd(vy0, _mm256_loadu_pd(ys + i));
    // mul + add rather than fma keeps results bit-identical to the scalar kernel.
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(d2));
  }
  scalar_kernels().distances(x0, y0, xs + i, ys + i, n - i, out + i);
}

void triweight_avx2(const double* dist, std::size_t n, double inv_bandwidth, double* out) {
  const __m256d inv = _mm256_set1_pd(inv_bandwidth);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d h = _mm256_mul_pd(_mm256_loadu_pd(dist + i), inv);
    const __m256d u = _mm256_sub_pd(one, _mm256_mul_pd(h, h));
    const __m256d w = _mm256_mul_pd(_mm256_mul_pd(u, u), u);
    const __m256d inside = _mm256_cmp_pd(h, one, _CMP_LT_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(w, inside));
  }
  scalar_kernels().triweight(dist + i, n - i, inv_bandwidth, out + i);
}

// exp(x) for x <= 0; returns 0 below -708 where the result would be subnormal.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lower = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lower);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(std::numbers::log2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);

  // Taylor polynomial of degree 13; |r| <= ln2/2 gives truncation below 1e-17.
  constexpr double inv_fact[] = {1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
                                 1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
                                 1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
                                 1.0 / 24.0,         1.0 / 6.0,         0.5,
                                 1.0,                1.0};
  __m256d p = _mm256_set1_pd(inv_fact[0]);
  for (std::size_t k = 1; k < std::size(inv_fact); ++k) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));
  }

  const __m128i n32 = _mm256_cvtpd_epi32(n);
  const __m256i n64 = _mm256_cvtepi32_epi64(n32);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  const __m256d scaled = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, scaled);
}

inline __m256d erfcx_nonnegative(__m256d x) {
  const __m256d k = _mm256_set1_pd(detail::kErfcxShift);
  const __m256d t = _mm256_div_pd(_mm256_sub_pd(x, k), _mm256_add_pd(x, k));
  const __m256d two_t = _mm256_add_pd(t, t);
  __m256d b1 = _mm256_setzero_pd();
  __m256d b2 = _mm256_setzero_pd();
  for (int j = detail::kErfcxTerms - 1; j >= 1; --j) {
    const __m256d b0 =
        _mm256_add_pd(_mm256_fmsub_pd(two_t, b1, b2), _mm256_set1_pd(detail::kErfcxCheb[j]));
    b2 = b1;
    b1 = b0;
  }
  return _mm256_add_pd(_mm256_fmsub_pd(t, b1, b2), _mm256_set1_pd(detail::kErfcxCheb[0]));
}

inline void crps_block(const double* mu, const double* sigma, const double* y, double* crps,
                       double* dmu, double* dsigma) {
  const __m256d vsigma = _mm256_loadu_pd(sigma);
  const __m256d z = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(y), _mm256_loadu_pd(mu)), vsigma);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d abs_z = _mm256_andnot_pd(sign_mask, z);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);

  // z^2/2 split into hi + lo so exp(-z^2/2) does not inherit the rounding of z^2.
  const __m256d zz = _mm256_mul_pd(z, z);
  const __m256d zz_lo = _mm256_fmsub_pd(z, z, zz);
  const __m256d e_hi = exp_nonpositive(_mm256_mul_pd(_mm256_sub_pd(_mm256_setzero_pd(), zz), half));
  const __m256d e = _mm256_fnmadd_pd(e_hi, _mm256_mul_pd(zz_lo, half), e_hi);

  const __m256d x = _mm256_mul_pd(abs_z, _mm256_set1_pd(0.5 * std::numbers::sqrt2));
  // tail = 0.5 erfc(|z|/sqrt2) = Phi(-|z|)
  const __m256d tail = _mm256_mul_pd(_mm256_mul_pd(half, e), erfcx_nonnegative(x));
  const __m256d pdf = _mm256_mul_pd(e, _mm256_set1_pd(std::numbers::inv_sqrtpi / std::numbers::sqrt2));
  const __m256d centre = _mm256_fnmadd_pd(_mm256_set1_pd(2.0), tail, one);  // |2 Phi(z) - 1|

  const __m256d ds = _mm256_fmsub_pd(_mm256_set1_pd(2.0), pdf, _mm256_set1_pd(std::numbers::inv_sqrtpi));
  _mm256_storeu_pd(crps, _mm256_mul_pd(vsigma, _mm256_fmadd_pd(abs_z, centre, ds)));
  if (dmu) {
    // 1 - 2 Phi(z) = -sign(z) |2 Phi(z) - 1|
    const __m256d zsign = _mm256_and_pd(sign_mask, z);
    _mm256_storeu_pd(dmu, _mm256_xor_pd(_mm256_xor_pd(centre, zsign), sign_mask));
  }
  if (dsigma) _mm256_storeu_pd(dsigma, ds);
}

void gaussian_crps_avx2(const double* mu, const double* sigma, const double* y, std::size_t n,
                        double* crps, double* dmu, double* dsigma) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    crps_block(mu + i, sigma + i, y + i, crps + i, dmu ? dmu + i : nullptr,
               dsigma ? dsigma + i : nullptr);
  }
  if (i == n) return;
  // Pad the remainder so every element goes through the same vector code.
  double m[kLanes] = {0, 0, 0, 0}, s[kLanes] = {1, 1, 1, 1}, v[kLanes] = {0, 0, 0, 0};
  double c[kLanes], g1[kLanes], g2[kLanes];
  const std::size_t rest = n - i;
  std::copy_n(mu + i, rest, m);
  std::copy_n(sigma + i, rest, s);
  std::copy_n(y + i, rest, v);
  crps_block(m, s, v, c, g1, g2);
  std::copy_n(c, rest, crps + i);
  if (dmu) std::copy_n(g1, rest, dmu + i);
  if (dsigma) std::copy_n(g2, rest, dsigma + i);
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", distances_avx2, triweight_avx2, gaussian_crps_avx2};
  return table;
}

}  // namespace aemos::simd
