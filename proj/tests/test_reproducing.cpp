#include <gtest/gtest.h>

#include <morreykit/reproducing.hpp>

#include <random>

using namespace morreykit;

TEST(Reproducing, IdentityInFrequency) {
  for (bool hom : {false, true})
    for (auto [n, J, L] : {std::tuple{1, 8, 2}, std::tuple{2, 6, 1}}) {
      RychkovPair rp(n, J, L, hom);
      std::vector<cplx> acc(std::size_t(1) << (n * J), 0.0);
      for (int j = rp.floor_level(); j <= rp.top(); ++j) {
        auto a = rp.phi_hat(j), b = rp.psi_hat(j);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a[i] * b[i];
      }
      // homogeneous pairs reproduce modulo constants
      if (hom) EXPECT_LT(std::abs(acc[0]), 1e-12);
      for (std::size_t i = hom ? 1 : 0; i < acc.size(); ++i) EXPECT_LT(std::abs(acc[i] - 1.0), 1e-12);
    }
}

TEST(Reproducing, ReproducesRandomField) {
  RychkovPair rp(1, 8, 2);
  GridFunction f(1, 8);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  for (auto& v : f.data) v = nd(rng);
  GridFunction sum(1, 8);
  for (int j = 0; j <= rp.top(); ++j) {
    auto g = rp.apply(f, rp.psi_hat(j));
    sum += rp.apply(g, rp.phi_hat(j));
  }
  EXPECT_LT((sum - f).max_abs(), 1e-11);
}

TEST(Reproducing, VanishingMoments) {
  const int L = 3;
  RychkovPair rp(1, 9, L);
  for (int j = 1; j <= rp.resolved_top(); ++j) {
    auto phi = rp.phi_kernel(j);
    for (int b = 0; b <= L; ++b) {
      double scale = std::pow(std::ldexp(1.0, -j), b) * phi.max_abs() * std::ldexp(1.0, -j);
      EXPECT_LT(std::abs(discrete_moment(phi, {b})), 1e-10 * scale) << j << ' ' << b;
    }
  }
  // D_0 itself has unit mass and no higher moments up to L
  auto d0 = rp.apply([&] {
    GridFunction e(1, 9);
    e.data[0] = double(e.G());
    return e;
  }(), rp.phi_hat(0));
  EXPECT_NEAR(discrete_moment(d0, {0}).real(), 1.0, 1e-12);
  for (int b = 1; b <= L; ++b) EXPECT_LT(std::abs(discrete_moment(d0, {b})), 1e-13);
}

TEST(Reproducing, CompactSupport) {
  const int J = 8, G = 1 << J;
  RychkovPair rp(1, J, 2);
  for (int j = 1; j <= rp.resolved_top(); ++j) {
    auto k = rp.phi_kernel(j);
    double reach = std::ldexp(1.0, -j - 1);
    for (int i = 0; i < G; ++i) {
      double x = std::abs(double(mode_of(i, G)) / G);
      if (x > reach + 1e-12) EXPECT_LT(std::abs(k.data[i]), 1e-9 * k.max_abs()) << j << ' ' << i;
    }
  }
}

TEST(Reproducing, ConvolveMatchesSpectrum) {
  RychkovPair rp(2, 5, 1);
  GridFunction f(2, 5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (auto& v : f.data) v = nd(rng);
  for (int j = 0; j <= rp.top(); ++j) {
    auto a = rp.convolve_D(f, j);
    auto s = fft_forward(f);
    for_each_frequency(2, 5, [&](std::size_t i, const double*, const int* c) { s[i] *= rp.D_hat(j, c); });
    auto b = fft_inverse(s, 2, 5);
    EXPECT_LT((a - b).max_abs(), 1e-11);
  }
}

TEST(Reproducing, TooCoarse) { EXPECT_THROW(RychkovPair(1, 3, 4), domain_error); }
