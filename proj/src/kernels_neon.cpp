#include <arm_neon.h>

#include <algorithm>

#include "engset/kernels.hpp"

namespace engset::kernels::detail {
namespace {

// Separate multiply and add (vmulq/vaddq) keep results identical to the
// scalar kernels, which are compiled with -ffp-contract=off.
void multiply_linear_neon(std::span<double> c, double r) {
  double* d = c.data();
  std::size_t k = c.size();
  const float64x2_t rv = vdupq_n_f64(r);
  while (k >= 3) {
    const std::size_t s = k - 2;
    const float64x2_t hi = vld1q_f64(d + s);
    const float64x2_t lo = vld1q_f64(d + s - 1);
    vst1q_f64(d + s, vaddq_f64(hi, vmulq_f64(rv, lo)));
    k = s;
  }
  for (; k-- > 1;) d[k] = d[k] + r * d[k - 1];
}

void bernoulli_mix_neon(std::span<double> c, double p) {
  if (c.empty()) return;
  double* d = c.data();
  const double q = 1.0 - p;
  std::size_t k = c.size();
  const float64x2_t pv = vdupq_n_f64(p);
  const float64x2_t qv = vdupq_n_f64(q);
  while (k >= 3) {
    const std::size_t s = k - 2;
    const float64x2_t hi = vld1q_f64(d + s);
    const float64x2_t lo = vld1q_f64(d + s - 1);
    vst1q_f64(d + s, vaddq_f64(vmulq_f64(qv, hi), vmulq_f64(pv, lo)));
    k = s;
  }
  for (; k-- > 1;) d[k] = q * d[k] + p * d[k - 1];
  d[0] = q * d[0];
}

double dot_neon(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a.data() + i), vld1q_f64(b.data() + i)));
  double sum = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double max_value_neon(std::span<const double> c) {
  const std::size_t n = c.size();
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vld1q_f64(c.data() + i));
  double out = std::max(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
  for (; i < n; ++i) out = std::max(out, c[i]);
  return out;
}

void scale_neon(std::span<double> c, double factor) {
  const std::size_t n = c.size();
  const float64x2_t f = vdupq_n_f64(factor);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(c.data() + i, vmulq_f64(vld1q_f64(c.data() + i), f));
  for (; i < n; ++i) c[i] *= factor;
}

}  // namespace

const KernelTable neon_table{Backend::neon, multiply_linear_neon, bernoulli_mix_neon,
                             dot_neon,      max_value_neon,       scale_neon};

}  // namespace engset::kernels::detail
