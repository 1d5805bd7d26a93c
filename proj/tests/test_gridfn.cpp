#include <gtest/gtest.h>

#include <morreykit/sampling.hpp>

#include <random>

using namespace morreykit;

namespace {

GridFunction random_field(int n, int J, unsigned seed) {
  GridFunction f(n, J);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (auto& v : f.data) v = cplx(nd(rng), nd(rng));
  return f;
}

// Textbook O(N^2) DFT used as the reference transform.
std::vector<cplx> naive_dft(const GridFunction& f) {
  std::vector<cplx> out(f.size());
  std::vector<int> x(f.n), k(f.n);
  const int G = f.G();
  for (std::size_t a = 0; a < f.size(); ++a) {
    f.coords(a, k.data());
    cplx s = 0;
    for (std::size_t b = 0; b < f.size(); ++b) {
      f.coords(b, x.data());
      double ph = 0;
      for (int t = 0; t < f.n; ++t) ph += double(k[t]) * x[t];
      s += f.data[b] * std::polar(1.0, -2 * M_PI * ph / G);
    }
    out[a] = s;
  }
  return out;
}

GridFunction from_fn(int n, int J, const std::function<cplx(const double*)>& fn) {
  GridFunction f(n, J);
  std::vector<int> c(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords(i, c.data());
    for (int k = 0; k < n; ++k) x[k] = c[k] * f.h();
    f.data[i] = fn(x.data());
  }
  return f;
}

}  // namespace

TEST(GridFunction, FftMatchesNaive) {
  for (auto [n, J] : {std::pair{1, 5}, std::pair{2, 3}, std::pair{3, 2}}) {
    auto f = random_field(n, J, 11 + n);
    auto a = fft_forward(f);
    auto b = naive_dft(f);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-10);
  }
}

TEST(GridFunction, RoundTripAndParseval) {
  auto f = random_field(2, 5, 3);
  auto s = fft_forward(f);
  double e = 0;
  for (auto& v : s) e += std::norm(v);
  double d = 0;
  for (auto& v : f.data) d += std::norm(v);
  EXPECT_NEAR(e / f.size(), d, 1e-9 * d);
  auto g = fft_inverse(s, 2, 5);
  EXPECT_LT((g - f).max_abs(), 1e-13);
}

TEST(GridFunction, FrequencyConvention) {
  // A pure exponential e^{2 pi i 3x} lives at xi = 6 pi.
  auto f = from_fn(1, 5, [](const double* x) { return std::polar(1.0, 2 * M_PI * 3 * x[0]); });
  auto s = fft_forward(f);
  bool seen = false;
  for_each_frequency(1, 5, [&](std::size_t i, const double* xi, const int*) {
    if (std::abs(s[i]) > 1e-9) {
      EXPECT_NEAR(xi[0], 6 * M_PI, 1e-12);
      seen = true;
    }
  });
  EXPECT_TRUE(seen);
}

TEST(GridFunction, SpectralDerivative) {
  auto f = from_fn(2, 5, [](const double* x) { return std::sin(2 * M_PI * 3 * x[0]) * std::cos(2 * M_PI * x[1]); });
  auto d = spectral_derivative(f, {1, 2});
  auto want = from_fn(2, 5, [](const double* x) {
    return 2 * M_PI * 3 * std::cos(2 * M_PI * 3 * x[0]) * -(4 * M_PI * M_PI) * std::cos(2 * M_PI * x[1]);
  });
  EXPECT_LT((d - want).max_abs(), 1e-9 * want.max_abs());
}

TEST(GridFunction, MultiIndices) {
  auto m = multi_indices(2, 2);
  EXPECT_EQ(m.size(), 6u);
  EXPECT_EQ(abs_multi(m.back()), 2);
  EXPECT_EQ(multi_indices(3, 3).size(), 20u);
}

TEST(GridFunction, TranslateWraps) {
  auto f = random_field(2, 3, 5);
  auto g = translate(f, {-1, 9});
  std::vector<int> c{0, 0};
  std::vector<int> d{7, 1};
  EXPECT_EQ(g.data[g.flat(d.data())], f.data[f.flat(c.data())]);
}

TEST(FilterBank, PartitionOfUnity) {
  for (int n : {1, 2, 3}) {
    auto chk = check_bank(default_bank(), n, n == 3 ? 4 : 6);
    EXPECT_TRUE(chk.ok());
    EXPECT_LT(chk.partition_error, 1e-14);
  }
  auto alt = check_bank(alternate_bank(), 2, 5);
  EXPECT_TRUE(alt.ok());
}

TEST(FilterBank, BandsSumToFunction) {
  auto f = random_field(2, 5, 9);
  BandSet bs(f, default_bank());
  GridFunction sum(2, 5);
  for (int j = 0; j <= bs.top(); ++j) sum += bs.band(j);
  EXPECT_LT((sum - f).max_abs(), 1e-12 * f.max_abs());
}

TEST(FilterBank, PureModeLandsInOneBand) {
  // xi = 10 pi, so 2^-4 xi is inside the plateau annulus of tau.
  auto f = from_fn(1, 6, [](const double* x) { return std::cos(2 * M_PI * 5 * x[0]); });
  BandSet bs(f, default_bank());
  for (int j = 0; j <= bs.top(); ++j) {
    double err = j == 4 ? (bs.band(j) - f).max_abs() : bs.band(j).max_abs();
    EXPECT_LT(err, 1e-13) << "band " << j;
  }
}

TEST(FilterBank, LowBandsEmptyOnTorus) {
  // Nonzero modes have |xi| >= 2 pi > 3, so theta sees only the mean and tau_1 sees nothing.
  auto f = random_field(1, 6, 4);
  BandSet bs(f, default_bank());
  auto b0 = bs.band(0);
  cplx mean = f.integral();
  for (auto& v : b0.data) EXPECT_LT(std::abs(v - mean), 1e-12);
  EXPECT_LT(bs.band(1).max_abs(), 1e-13);
}

TEST(FilterBank, BandRejectsBadLevel) {
  auto f = random_field(1, 4, 1);
  EXPECT_THROW(band(f, default_bank(), 9), domain_error);
  EXPECT_THROW(band(f, default_bank(), -1), domain_error);
  EXPECT_NO_THROW(band(f, default_bank(), -1, true));
}

TEST(Sampling, ReconstructsBandLimited) {
  for (int n : {1, 2}) {
    int J = n == 1 ? 7 : 5;
    auto f = from_fn(n, J, [n](const double* x) {
      double v = std::cos(2 * M_PI * 2 * x[0]) + 0.5 * std::sin(2 * M_PI * x[0]);
      if (n == 2) v *= 1 + std::cos(2 * M_PI * 3 * x[1]);
      return cplx(v, 0);
    });
    int nu = 3;
    auto g = sample_expand(f, default_bank().kappa, nu);
    EXPECT_LT((g - f).max_abs(), 1e-12);
  }
}

TEST(Sampling, RejectsWideSpectrum) {
  auto f = from_fn(1, 6, [](const double* x) { return std::cos(2 * M_PI * 20 * x[0]); });
  EXPECT_THROW(sample_expand(f, default_bank().kappa, 2), precondition_error);
  EXPECT_THROW(sample_expand(f, default_bank().kappa, 7), precondition_error);
}

TEST(Sampling, SobolevGaussian) {
  // int (1+xi^2) e^{-xi^2} dxi = 3 sqrt(pi) / 2
  auto H = FrequencySamples::sample([](const double* xi, int) { return cplx(std::exp(-xi[0] * xi[0] / 2), 0); },
                                    1, 4096, 0.01);
  EXPECT_NEAR(sobolev_norm(H, 1.0), std::sqrt(1.5 * std::sqrt(M_PI)), 1e-10);
  // n = 2, nu = 0: int e^{-|xi|^2} = pi
  auto H2 = FrequencySamples::sample(
      [](const double* xi, int) { return cplx(std::exp(-(xi[0] * xi[0] + xi[1] * xi[1]) / 2), 0); }, 2, 512, 0.05);
  EXPECT_NEAR(sobolev_norm(H2, 0.0), std::sqrt(M_PI), 1e-10);
}
