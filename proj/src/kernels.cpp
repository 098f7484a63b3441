#include "engset/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "engset/error.hpp"

namespace engset::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(ENGSET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("ENGSET_KERNELS")) {
    const std::string name(env);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
      if (name == backend_name(b) && backend_supported(b)) return &table(b);
    }
  }
  if (backend_supported(Backend::avx2)) return &table(Backend::avx2);
  if (backend_supported(Backend::neon)) return &table(Backend::neon);
  return &detail::scalar_table;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{pick_default()};
  return ptr;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend b) noexcept {
  switch (b) {
    case Backend::scalar: return true;
    case Backend::avx2: return cpu_has_avx2();
    case Backend::neon:
#if defined(ENGSET_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend b) {
  if (!backend_supported(b))
    throw DomainError("kernel backend '" + std::string(backend_name(b)) + "' is not available");
  switch (b) {
#if defined(ENGSET_HAVE_AVX2)
    case Backend::avx2: return detail::avx2_table;
#endif
#if defined(ENGSET_HAVE_NEON)
    case Backend::neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void set_backend(Backend b) { current().store(&table(b), std::memory_order_release); }

void bernoulli_mix_capped(std::span<double> c, double p) {
  if (c.empty()) return;
  const double top = c.back();
  bernoulli_mix(c, p);
  // (1-p)*top + p*c[K-1] from the plain mix, plus the p*top that stays in the tail.
  c.back() += p * top;
}

}  // namespace engset::kernels
