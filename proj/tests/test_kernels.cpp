#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "engset/analytic.hpp"
#include "engset/error.hpp"
#include "engset/kernels.hpp"
#include "oracles.hpp"

using namespace engset;
using kernels::Backend;

namespace {

std::vector<Backend> vector_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::avx2, Backend::neon})
    if (kernels::backend_supported(b)) out.push_back(b);
  return out;
}

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(gen);
  return v;
}

// Naive polynomial product, truncated: reference for both mixing kernels.
std::vector<double> times_linear(const std::vector<double>& c, double a0, double a1) {
  std::vector<double> out(c.size(), 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    out[k] += a0 * c[k];
    if (k + 1 < c.size()) out[k + 1] += a1 * c[k];
  }
  return out;
}

class BackendRestore : public ::testing::Test {
 protected:
  void TearDown() override { kernels::set_backend(saved_); }
  Backend saved_ = kernels::active().backend;
};

}  // namespace

TEST(Kernels, ScalarMatchesNaivePolynomialProduct) {
  std::mt19937_64 gen(1);
  const auto& t = kernels::table(Backend::scalar);
  for (std::size_t n : {1u, 2u, 5u, 17u}) {
    std::vector<double> c = random_vector(gen, n);
    const std::vector<double> expect_lin = times_linear(c, 1.0, 0.75);
    const std::vector<double> expect_mix = times_linear(c, 0.7, 0.3);
    std::vector<double> lin = c, mix = c;
    t.multiply_linear(lin, 0.75);
    t.bernoulli_mix(mix, 0.3);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_NEAR(lin[k], expect_lin[k], 1e-14);
      EXPECT_NEAR(mix[k], expect_mix[k], 1e-14);
    }
  }
}

TEST(Kernels, VectorBackendsAreBitIdenticalOnElementwiseKernels) {
  const auto backends = vector_backends();
  if (backends.empty()) GTEST_SKIP() << "no vector backend on this CPU";
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> coef(0.0, 50.0);
  const auto& ref = kernels::table(Backend::scalar);
  for (Backend b : backends) {
    const auto& vec = kernels::table(b);
    for (std::size_t n = 0; n <= 67; ++n) {
      const std::vector<double> c = random_vector(gen, n);
      const double r = coef(gen);
      const double p = r / (1.0 + r);

      std::vector<double> a = c, bvec = c;
      ref.multiply_linear(a, r);
      vec.multiply_linear(bvec, r);
      EXPECT_EQ(a, bvec) << kernels::backend_name(b) << " multiply_linear n=" << n;

      a = c, bvec = c;
      ref.bernoulli_mix(a, p);
      vec.bernoulli_mix(bvec, p);
      EXPECT_EQ(a, bvec) << kernels::backend_name(b) << " bernoulli_mix n=" << n;

      a = c, bvec = c;
      ref.scale(a, 0x1p-7);
      vec.scale(bvec, 0x1p-7);
      EXPECT_EQ(a, bvec);

      EXPECT_EQ(ref.max_value(c), vec.max_value(c));
    }
  }
}

TEST(Kernels, VectorDotAgreesToRounding) {
  const auto backends = vector_backends();
  if (backends.empty()) GTEST_SKIP() << "no vector backend on this CPU";
  std::mt19937_64 gen(3);
  for (Backend b : backends) {
    for (std::size_t n = 0; n <= 131; ++n) {
      const std::vector<double> x = random_vector(gen, n);
      const std::vector<double> y = random_vector(gen, n);
      const double s = kernels::table(Backend::scalar).dot(x, y);
      const double v = kernels::table(b).dot(x, y);
      EXPECT_NEAR(v, s, 1e-15 * (1.0 + s) * static_cast<double>(n + 1));
    }
  }
}

TEST(Kernels, CappedMixKeepsTheUpperTail) {
  // Three fair coins, capped at "count >= 2".
  std::vector<double> c{1.0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) kernels::bernoulli_mix_capped(c, 0.5);
  EXPECT_DOUBLE_EQ(c[0], 0.125);
  EXPECT_DOUBLE_EQ(c[1], 0.375);
  EXPECT_DOUBLE_EQ(c[2], 0.5);
}

TEST_F(BackendRestore, SolversAgreeAcrossBackends) {
  std::mt19937_64 gen(4);
  std::vector<std::vector<double>> cases;
  for (int i = 0; i < 10; ++i) cases.push_back(engset::testing::random_loads(gen, 40, 0.9));

  kernels::set_backend(Backend::scalar);
  std::vector<BlockingMetrics> lcc_ref, ofl_ref;
  for (const auto& a : cases) {
    lcc_ref.push_back(engset_lcc(LoadVector(a), 9));
    ofl_ref.push_back(engset_ofl(LoadVector(a), 9));
  }
  for (Backend b : vector_backends()) {
    kernels::set_backend(b);
    EXPECT_EQ(kernels::active().backend, b);
    for (std::size_t c = 0; c < cases.size(); ++c) {
      const BlockingMetrics l = engset_lcc(LoadVector(cases[c]), 9);
      const BlockingMetrics o = engset_ofl(LoadVector(cases[c]), 9);
      EXPECT_NEAR(l.traffic_congestion, lcc_ref[c].traffic_congestion, 1e-14);
      EXPECT_NEAR(l.call_congestion, lcc_ref[c].call_congestion, 1e-14);
      EXPECT_NEAR(l.time_congestion, lcc_ref[c].time_congestion, 1e-14);
      EXPECT_NEAR(o.traffic_congestion, ofl_ref[c].traffic_congestion, 1e-14);
      EXPECT_NEAR(o.call_congestion, ofl_ref[c].call_congestion, 1e-14);
    }
  }
}

TEST(Kernels, UnsupportedBackendIsRejected) {
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (!kernels::backend_supported(b)) EXPECT_THROW((void)kernels::table(b), DomainError);
  }
  EXPECT_EQ(kernels::backend_name(Backend::scalar), "scalar");
}
