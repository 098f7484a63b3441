#include "engset/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "engset/error.hpp"
#include "engset/kernels.hpp"

namespace engset {
namespace {

void check_model_args(const LoadVector& loads, int wavelengths) {
  if (wavelengths < 1) throw DomainError("W must be >= 1");
  if (!loads.has_traffic()) throw DomainError("zero total load: congestion ratios undefined");
}

// Polynomial coefficients stored as coeffs * 2^exponent. Rescaling by powers
// of two is exact, so renormalising after every factor only moves the
// exponent and never perturbs the mantissas.
struct ScaledPoly {
  std::vector<double> coeffs;
  long exponent = 0;

  explicit ScaledPoly(std::size_t size) : coeffs(size, 0.0) { coeffs[0] = 1.0; }

  void multiply_by_source(double r) {
    kernels::multiply_linear(coeffs, r);
    renormalize();
  }

  void renormalize() {
    const double m = kernels::max_value(coeffs);
    if (!(m > 0.0)) return;
    int e = 0;
    std::frexp(m, &e);
    if (e == 0) return;
    kernels::scale(coeffs, std::ldexp(1.0, -e));
    exponent += e;
  }
};

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

BlockingMetrics zero_metrics(std::size_t sources) {
  BlockingMetrics m;
  m.per_source_call.assign(sources, 0.0);
  m.per_source_traffic.assign(sources, 0.0);
  return m;
}

// Leave-one-out sums for source i combine the product of the sources before
// i (prefix) with the product of the sources after i (suffix). Suffixes are
// built once from the back and stored; the prefix is grown in place.
std::vector<ScaledPoly> lcc_suffixes(std::span<const double> r, std::size_t width,
                                     ScaledPoly& full) {
  const std::size_t m = r.size();
  std::vector<ScaledPoly> suffix(m, ScaledPoly(width));
  for (std::size_t i = m; i-- > 0;) {
    suffix[i] = full;
    full.multiply_by_source(r[i]);
  }
  return suffix;
}

}  // namespace

double OccupancyDistribution::mean() const noexcept {
  double e = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) e += static_cast<double>(k) * probs[k];
  return e;
}

OccupancyDistribution lcc_occupancy(const LoadVector& loads, int wavelengths) {
  if (wavelengths < 1) throw DomainError("W must be >= 1");
  ScaledPoly g(static_cast<std::size_t>(wavelengths) + 1);
  for (double r : offered_ratios(loads)) g.multiply_by_source(r);
  const double total = sum_of(g.coeffs);
  OccupancyDistribution out;
  out.probs = g.coeffs;
  for (double& p : out.probs) p /= total;
  return out;
}

BlockingMetrics engset_lcc(const LoadVector& loads, int wavelengths) {
  check_model_args(loads, wavelengths);
  const std::size_t m = loads.size();
  const std::size_t w = static_cast<std::size_t>(wavelengths);
  // With more wavelengths than sources no state has W busy channels.
  if (w > m) return zero_metrics(m);

  const std::vector<double> r = offered_ratios(loads);
  const std::size_t width = w + 1;

  ScaledPoly full(width);
  const std::vector<ScaledPoly> suffix = lcc_suffixes(r, width, full);
  const double g_sum = sum_of(full.coeffs);

  BlockingMetrics out;
  out.time_congestion = full.coeffs[w] / g_sum;
  out.per_source_call.resize(m);
  out.per_source_traffic.resize(m);

  std::vector<double> rev_s(width);
  std::vector<double> rev_cum(width);
  ScaledPoly prefix(width);
  double attempts_blocked = 0.0;
  double attempts = 0.0;
  double lost = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::vector<double>& s = suffix[i].coeffs;
    double running = 0.0;
    for (std::size_t t = 0; t < width; ++t) {
      running += s[t];
      rev_s[w - t] = s[t];
      rev_cum[w - t] = running;
    }
    // e_W(r without i) and sum_{k<=W} e_k(r without i), both scaled by
    // 2^(prefix.exponent + suffix.exponent).
    const double busy_num = kernels::dot(prefix.coeffs, rev_s);
    const double off_num = kernels::dot(prefix.coeffs, rev_cum);
    const long shift = prefix.exponent + suffix[i].exponent - full.exponent;
    const double p_off_busy = std::ldexp(busy_num / g_sum, static_cast<int>(shift));
    const double p_off = std::ldexp(off_num / g_sum, static_cast<int>(shift));

    out.per_source_call[i] = off_num > 0.0 ? busy_num / off_num : 0.0;
    // A_i - c_i = A_i * P(i off, W busy), so the per-source loss ratio is
    // P(i off, W busy) itself; this avoids cancelling A_i against c_i.
    out.per_source_traffic[i] = std::clamp(p_off_busy, 0.0, 1.0);

    attempts_blocked += r[i] * p_off_busy;
    attempts += r[i] * p_off;
    lost += loads[i] * p_off_busy;

    prefix.multiply_by_source(r[i]);
  }

  out.call_congestion = attempts > 0.0 ? std::clamp(attempts_blocked / attempts, 0.0, 1.0) : 0.0;
  out.traffic_congestion = std::clamp(lost / loads.total(), 0.0, 1.0);
  return out;
}

OccupancyDistribution ofl_occupancy(const LoadVector& loads) {
  OccupancyDistribution out;
  out.probs.assign(loads.size() + 1, 0.0);
  out.probs[0] = 1.0;
  for (double a : loads) kernels::bernoulli_mix(out.probs, a);
  return out;
}

BlockingMetrics engset_ofl(const LoadVector& loads, int wavelengths) {
  check_model_args(loads, wavelengths);
  const std::size_t m = loads.size();
  const std::size_t w = static_cast<std::size_t>(wavelengths);
  if (w > m) return zero_metrics(m);

  const OccupancyDistribution occ = ofl_occupancy(loads);
  BlockingMetrics out;
  double tail = 0.0;
  double overflow = 0.0;
  for (std::size_t k = w; k <= m; ++k) {
    tail += occ.probs[k];
    overflow += static_cast<double>(k - w) * occ.probs[k];
  }
  out.time_congestion = std::clamp(tail, 0.0, 1.0);
  out.traffic_congestion = std::clamp(overflow / loads.total(), 0.0, 1.0);
  out.per_source_call.assign(m, 0.0);

  // P(N_{-i} >= W) needs at least W other sources.
  if (w <= m - 1) {
    // Capped laws: entry W holds P(count >= W).
    const std::size_t width = w + 1;
    std::vector<std::vector<double>> suffix(m);
    std::vector<double> cur(width, 0.0);
    cur[0] = 1.0;
    for (std::size_t i = m; i-- > 0;) {
      suffix[i] = cur;
      kernels::bernoulli_mix_capped(cur, loads[i]);
    }
    std::vector<double> prefix(width, 0.0);
    prefix[0] = 1.0;
    std::vector<double> rev_tail(w);
    for (std::size_t i = 0; i < m; ++i) {
      const std::vector<double>& s = suffix[i];
      // rev_tail[j] = P(suffix count >= W - j) for j = 0..W-1.
      double running = s[w];
      rev_tail[0] = running;
      for (std::size_t j = 1; j < w; ++j) {
        running += s[w - j];
        rev_tail[j] = running;
      }
      const double blocked =
          prefix[w] + kernels::dot(std::span<const double>(prefix).first(w), rev_tail);
      out.per_source_call[i] = std::clamp(blocked, 0.0, 1.0);
      kernels::bernoulli_mix_capped(prefix, loads[i]);
    }
  }

  double weighted = 0.0;
  for (std::size_t i = 0; i < m; ++i) weighted += loads[i] * out.per_source_call[i];
  out.call_congestion = std::clamp(weighted / loads.total(), 0.0, 1.0);
  out.per_source_traffic = out.per_source_call;
  return out;
}

namespace {

// pi_k ~ C(n, k) r^k for k = 0..min(W, n), normalised.
std::vector<double> truncated_binomial(int n, double r, int wavelengths) {
  const int top = std::min(wavelengths, n);
  std::vector<double> t(static_cast<std::size_t>(top) + 1, 0.0);
  t[0] = 1.0;
  for (int k = 1; k <= top; ++k) {
    t[k] = t[k - 1] * (static_cast<double>(n - k + 1) / k) * r;
    if (t[k] > 0x1p512) {
      for (int j = 0; j <= k; ++j) t[j] = std::ldexp(t[j], -512);
    }
  }
  const double total = sum_of(t);
  for (double& v : t) v /= total;
  return t;
}

}  // namespace

BlockingMetrics engset_classical(int sources, double per_source_load, int wavelengths) {
  if (sources < 1) throw DomainError("number of sources must be >= 1");
  if (wavelengths < 1) throw DomainError("W must be >= 1");
  if (!std::isfinite(per_source_load) || per_source_load < 0.0 || per_source_load >= 1.0)
    throw DomainError("per-source load must satisfy 0 <= A < 1");
  if (!(per_source_load > 0.0)) throw DomainError("zero total load: congestion ratios undefined");

  const double r = per_source_load / (1.0 - per_source_load);
  const std::vector<double> pi = truncated_binomial(sources, r, wavelengths);

  BlockingMetrics out;
  out.time_congestion = wavelengths <= sources ? pi[wavelengths] : 0.0;
  if (wavelengths < sources) {
    // An arriving source sees the other S - 1 sources in their own truncated law.
    const std::vector<double> others = truncated_binomial(sources - 1, r, wavelengths);
    out.call_congestion = wavelengths <= sources - 1 ? others[wavelengths] : 0.0;
    double carried = 0.0;
    for (std::size_t k = 0; k < pi.size(); ++k) carried += static_cast<double>(k) * pi[k];
    const double offered = sources * per_source_load;
    out.traffic_congestion = std::clamp((offered - carried) / offered, 0.0, 1.0);
  }
  out.per_source_call.assign(sources, out.call_congestion);
  out.per_source_traffic.assign(sources, out.traffic_congestion);
  return out;
}

}  // namespace engset
