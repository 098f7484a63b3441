#pragma once

#include <span>
#include <string_view>

// Inner loops of the analytic solvers. Each kernel has a scalar reference
// implementation and, where the target supports it, a vector variant; the
// active table is chosen once at first use from the CPU's capabilities and
// can be overridden with ENGSET_KERNELS=scalar|avx2|neon or set_backend().
//
// Elementwise kernels are bit-identical across backends (no fused
// multiply-add anywhere). dot() reassociates its sum and agrees with the
// scalar version only to rounding.
namespace engset::kernels {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  // c(x) <- c(x) * (1 + r x), truncated to c.size() coefficients.
  void (*multiply_linear)(std::span<double> c, double r);
  // c(x) <- c(x) * ((1 - p) + p x), truncated to c.size() coefficients.
  void (*bernoulli_mix)(std::span<double> c, double p);
  double (*dot)(std::span<const double> a, std::span<const double> b);
  // Largest entry of a nonnegative vector; 0 for an empty one.
  double (*max_value)(std::span<const double> c);
  void (*scale)(std::span<double> c, double factor);
};

std::string_view backend_name(Backend b) noexcept;
bool backend_supported(Backend b) noexcept;

/// Throws DomainError for a backend this build or CPU cannot run.
const KernelTable& table(Backend b);

const KernelTable& active();
void set_backend(Backend b);

inline void multiply_linear(std::span<double> c, double r) { active().multiply_linear(c, r); }
inline void bernoulli_mix(std::span<double> c, double p) { active().bernoulli_mix(c, p); }
inline double dot(std::span<const double> a, std::span<const double> b) { return active().dot(a, b); }
inline double max_value(std::span<const double> c) { return active().max_value(c); }
inline void scale(std::span<double> c, double factor) { active().scale(c, factor); }

/// Like bernoulli_mix, but the last coefficient accumulates the whole upper
/// tail "count >= c.size() - 1" instead of being truncated.
void bernoulli_mix_capped(std::span<double> c, double p);

namespace detail {
extern const KernelTable scalar_table;
#if defined(ENGSET_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(ENGSET_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace engset::kernels
