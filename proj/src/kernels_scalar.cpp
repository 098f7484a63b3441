#include <algorithm>

#include "engset/kernels.hpp"

namespace engset::kernels::detail {
namespace {

void multiply_linear_scalar(std::span<double> c, double r) {
  for (std::size_t k = c.size(); k-- > 1;) c[k] = c[k] + r * c[k - 1];
}

void bernoulli_mix_scalar(std::span<double> c, double p) {
  if (c.empty()) return;
  const double q = 1.0 - p;
  for (std::size_t k = c.size(); k-- > 1;) c[k] = q * c[k] + p * c[k - 1];
  c[0] = q * c[0];
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double max_value_scalar(std::span<const double> c) {
  double m = 0.0;
  for (double v : c) m = std::max(m, v);
  return m;
}

void scale_scalar(std::span<double> c, double factor) {
  for (double& v : c) v *= factor;
}

}  // namespace

const KernelTable scalar_table{Backend::scalar,  multiply_linear_scalar, bernoulli_mix_scalar,
                               dot_scalar,       max_value_scalar,       scale_scalar};

}  // namespace engset::kernels::detail
