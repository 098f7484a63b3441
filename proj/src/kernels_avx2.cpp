#include <immintrin.h>

#include <algorithm>

#include "engset/kernels.hpp"

namespace engset::kernels::detail {
namespace {

// Descending blocks of four: block [s, s+3] reads c[s-1 .. s+3], none of
// which has been overwritten yet.
void multiply_linear_avx2(std::span<double> c, double r) {
  double* d = c.data();
  std::size_t k = c.size();
  const __m256d rv = _mm256_set1_pd(r);
  while (k >= 5) {
    const std::size_t s = k - 4;
    const __m256d hi = _mm256_loadu_pd(d + s);
    const __m256d lo = _mm256_loadu_pd(d + s - 1);
    _mm256_storeu_pd(d + s, _mm256_add_pd(hi, _mm256_mul_pd(rv, lo)));
    k = s;
  }
  for (; k-- > 1;) d[k] = d[k] + r * d[k - 1];
}

void bernoulli_mix_avx2(std::span<double> c, double p) {
  if (c.empty()) return;
  double* d = c.data();
  const double q = 1.0 - p;
  std::size_t k = c.size();
  const __m256d pv = _mm256_set1_pd(p);
  const __m256d qv = _mm256_set1_pd(q);
  while (k >= 5) {
    const std::size_t s = k - 4;
    const __m256d hi = _mm256_loadu_pd(d + s);
    const __m256d lo = _mm256_loadu_pd(d + s - 1);
    _mm256_storeu_pd(d + s, _mm256_add_pd(_mm256_mul_pd(qv, hi), _mm256_mul_pd(pv, lo)));
    k = s;
  }
  for (; k-- > 1;) d[k] = q * d[k] + p * d[k - 1];
  d[0] = q * d[0];
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i + 4),
                                             _mm256_loadu_pd(b.data() + i + 4)));
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double max_value_avx2(std::span<const double> c) {
  const std::size_t n = c.size();
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(c.data() + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) out = std::max(out, c[i]);
  return out;
}

void scale_avx2(std::span<double> c, double factor) {
  const std::size_t n = c.size();
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(c.data() + i, _mm256_mul_pd(_mm256_loadu_pd(c.data() + i), f));
  for (; i < n; ++i) c[i] *= factor;
}

}  // namespace

const KernelTable avx2_table{Backend::avx2, multiply_linear_avx2, bernoulli_mix_avx2,
                             dot_avx2,      max_value_avx2,       scale_avx2};

}  // namespace engset::kernels::detail
