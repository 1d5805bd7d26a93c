#include <gtest/gtest.h>

#include <morreykit/norms.hpp>

#include <random>

using namespace morreykit;

namespace {

std::vector<GrowthFunction> families(int n, double q) {
  auto scales = dyadic_scales(-12, 2);
  return {GrowthFunction::power(2 * q, n), GrowthFunction::power_log(q, 0.5, n), GrowthFunction::log_inv(0.5, n),
          normalize_star(GrowthFunction::power_log(1.5 * q, 0.3, n), q, scales)};
}

GridFunction random_grid(int n, int J, std::uint64_t seed) {
  GridFunction f(n, J);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (auto& v : f.data) v = cplx(nd(rng), nd(rng));
  return f;
}

CoeffField random_field(int n, int jmin, int jmax, std::uint64_t seed, double density = 0.3) {
  CoeffField c(n, jmin, jmax);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::lognormal_distribution<double> ln(0, 1);
  for (int j = jmin; j <= jmax; ++j)
    for (auto& v : c.level(j))
      if (u(rng) < density) v = ln(rng) * (u(rng) < 0.5 ? 1 : -1);
  return c;
}

// Brute force Morrey norm: loop over every dyadic cube, average directly.
double brute_morrey(const GridFunction& f, double q, const GrowthFunction& phi) {
  const int G = f.G();
  double best = 0;
  std::vector<int> c(f.n);
  for (int j = 0; j <= f.J; ++j) {
    CubeLattice lat{f.n, j, 0, true};
    for (std::int64_t k = 0; k < lat.cubes_at(j); ++k) {
      auto cells = box_cells(dilate(lat.cube(j, k), 1.0), G);
      double s = 0;
      for (auto i : cells) s += std::pow(std::abs(f.data[i]), q);
      best = std::max(best, phi(std::ldexp(1.0, -j)) * std::pow(s / cells.size(), 1 / q));
    }
  }
  return best;
}

SpaceParams params(int n, double q, double r, double s, Variant v, GrowthFunction phi) {
  SpaceParams p;
  p.n = n;
  p.q = q;
  p.r = r;
  p.s = s;
  p.variant = v;
  p.phi = phi;
  return p;
}

}  // namespace

TEST(Morrey, MatchesBruteForce) {
  for (int n : {1, 2}) {
    auto f = random_grid(n, n == 1 ? 6 : 4, 3);
    for (double q : {0.5, 1.0, 2.5})
      for (auto& phi : families(n, q)) EXPECT_NEAR(morrey_norm(f, q, phi), brute_morrey(f, q, phi), 1e-12 * brute_morrey(f, q, phi));
  }
}

TEST(Morrey, CubeIndicatorEqualsPhi) {
  std::mt19937_64 rng(5);
  const int n = 2, J = 8;
  for (double q : {1.0, 2.0}) {
    auto fam = families(n, q);
    for (auto& phi : fam) ASSERT_TRUE(is_in_Gq(phi, q, dyadic_scales(-8, 0)));
    for (int t = 0; t < 20; ++t) {
      int j = rng() % (J + 1);
      DyadicCube Q{j, {std::int64_t(rng() % (1u << j)), std::int64_t(rng() % (1u << j))}};
      GridFunction chi(n, J);
      for (auto i : box_cells(dilate(Q, 1.0), chi.G())) chi.data[i] = 1.0;
      for (auto& phi : fam) {
        double want = phi(Q.side());
        EXPECT_NEAR(morrey_norm(chi, q, phi), want, 1e-12 * want);
      }
    }
  }
}

TEST(Morrey, PowerIdentity) {
  auto f = random_grid(2, 5, 8);
  for (double q : {0.5, 2.0})
    for (auto& phi : families(2, q))
      for (double u : {0.5, 2.0, 3.0}) {
        double lhs = morrey_norm(abs_pow(f, u), q, phi);
        double rhs = std::pow(morrey_norm(f, u * q, phi.raised(1 / u)), u);
        EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
      }
}

TEST(Morrey, HomogeneousLevelsUseGlobalMean) {
  auto f = random_grid(1, 6, 1);
  auto phi = GrowthFunction::power(2.0, 1);
  double mean = 0;
  for (auto& v : f.data) mean += std::norm(v);
  mean /= f.size();
  double want = std::max(morrey_norm(f, 2, phi), phi(16.0) * std::sqrt(mean));
  EXPECT_NEAR(morrey_norm(f, 2, phi, -4), want, 1e-13 * want);
  EXPECT_EQ(morrey_sup(f, 2, phi, -4).cube.j, -4);
}

TEST(Morrey, ZeroAndHomogeneity) {
  GridFunction z(2, 4);
  EXPECT_EQ(morrey_norm(z, 1.0, GrowthFunction::power(2, 2)), 0.0);
  auto f = random_grid(2, 4, 2);
  auto phi = GrowthFunction::power(3, 2);
  EXPECT_NEAR(morrey_norm(-2.5 * f, 1.5, phi), 2.5 * morrey_norm(f, 1.5, phi), 1e-14 * morrey_norm(f, 1.5, phi) * 3);
}

TEST(SpaceNorm, ZeroAndHomogeneity) {
  auto p = params(1, 2, 2, 0.5, Variant::E, GrowthFunction::power(4, 1));
  GridFunction z(1, 6);
  EXPECT_EQ(space_norm(z, p, default_bank()).value, 0.0);
  auto f = random_grid(1, 6, 4);
  for (Variant v : {Variant::N, Variant::E}) {
    p.variant = v;
    double a = space_norm(f, p, default_bank()), b = space_norm(3.0 * f, p, default_bank());
    EXPECT_NEAR(b, 3 * a, 1e-13 * b);
  }
}

TEST(SpaceNorm, SingleBand) {
  // cos(2 pi 5 x) sits in tau_4 with window value 1.
  GridFunction f(1, 7);
  for (std::size_t i = 0; i < f.size(); ++i) f.data[i] = std::cos(2 * M_PI * 5 * i * f.h());
  auto phi = GrowthFunction::power(3, 1);
  for (Variant v : {Variant::N, Variant::E})
    for (double r : {1.0, kInf}) {
      auto p = params(1, 2, r, 0.7, v, phi);
      double want = std::exp2(4 * 0.7) * morrey_norm(f, 2, phi);
      EXPECT_NEAR(space_norm(f, p, default_bank()).value, want, 1e-12 * want);
    }
}

TEST(SpaceNorm, NandEAgreeWhenMorreyIsLq) {
  // phi = t^{n/q}: the Morrey norm is the L^q norm, so N and E coincide at r = q.
  auto f = random_grid(2, 5, 6);
  for (double q : {1.0, 2.0}) {
    auto pN = params(2, q, q, 0.3, Variant::N, GrowthFunction::power(q, 2));
    auto pE = pN;
    pE.variant = Variant::E;
    BandSet bs(f, default_bank());
    double a = space_norm(f, pN, default_bank()), b = space_norm(f, pE, default_bank());
    EXPECT_NEAR(a, b, 1e-12 * a);
  }
}

TEST(SpaceNorm, NakaiWarning) {
  auto p = params(1, 2, 2, 0, Variant::E, GrowthFunction::constant(1));
  GridFunction f = random_grid(1, 5, 1);
  EXPECT_FALSE(space_norm(f, p, default_bank()).warnings.empty());
  p.variant = Variant::N;
  EXPECT_TRUE(space_norm(f, p, default_bank()).warnings.empty());
}

TEST(SeqNorm, Singleton) {
  for (int n : {1, 2})
    for (double q : {0.5, 2.0})
      for (auto& phi : families(n, q))
        for (Variant v : {Variant::N, Variant::E}) {
          CoeffField c(n, 0, 5);
          int j0 = 3;
          c.at(j0, 5) = 2.0;
          auto p = params(n, q, 1.5, 0.8, v, phi);
          // sup over cubes containing Q of phi(l) (|Q|/|R|)^{1/q}; subcubes give phi(l') <= phi(l(Q))
          double want = 0;
          for (int j = 0; j <= 5; ++j) {
            double l = std::ldexp(1.0, -j);
            double frac = j <= j0 ? std::pow(std::ldexp(1.0, (j - j0) * n), 1 / q) : 1.0;
            want = std::max(want, phi(l) * frac);
          }
          want *= 2.0 * std::exp2(j0 * 0.8);
          EXPECT_NEAR(seq_norm(c, p).value, want, 1e-12 * want);
        }
}

TEST(SeqNorm, MatchesGridEvaluation) {
  // Indicator sums sampled on a fine grid give the same Morrey norms.
  auto c = random_field(2, 0, 4, 9);
  auto phi = GrowthFunction::power(3, 2);
  for (double r : {0.7, 2.0, kInf}) {
    auto p = params(2, 1.5, r, 0.4, Variant::E, phi);
    GridFunction g(2, 4);
    for (std::size_t i = 0; i < g.size(); ++i) {
      int x = i >> 4, y = i & 15;
      double acc = 0;
      for (int j = 0; j <= 4; ++j) {
        std::size_t flat = j == 0 ? 0 : ((x >> (4 - j)) << j) + (y >> (4 - j));
        double v = std::exp2(j * 0.4) * std::abs(c.at(j, flat));
        acc = std::isinf(r) ? std::max(acc, v) : acc + std::pow(v, r);
      }
      g.data[i] = std::isinf(r) ? acc : std::pow(acc, 1 / r);
    }
    double want = brute_morrey(g, 1.5, phi);
    EXPECT_NEAR(seq_norm(c, p).value, want, 1e-12 * want);
  }
}

TEST(SeqNorm, MonotoneInR) {
  for (int t = 0; t < 20; ++t) {
    auto c = random_field(2, 0, 5, 100 + t);
    for (Variant v : {Variant::N, Variant::E}) {
      double prev = kInf;
      for (double r : {0.5, 1.0, 2.0, 4.0, kInf}) {
        double x = seq_norm(c, params(2, 1.5, r, 0.3, v, GrowthFunction::power(3, 2))).value;
        EXPECT_LE(x, prev * (1 + 1e-12));
        prev = x;
      }
    }
  }
}

TEST(SeqNorm, HomogeneousLevels) {
  CoeffField c(1, -2, 3);
  c.at(-2, 0) = 1.0;
  auto p = params(1, 1, 1, 0.5, Variant::N, GrowthFunction::power(2, 1));
  p.homogeneous = true;
  p.hom_floor = -2;
  double want = std::exp2(-2 * 0.5) * std::sqrt(4.0);
  EXPECT_NEAR(seq_norm(c, p).value, want, 1e-14);
  p.homogeneous = false;
  EXPECT_THROW(seq_norm(c, p), domain_error);
}

TEST(Triangle, RandomPairs) {
  std::mt19937_64 rng(77);
  int checked = 0;
  for (double q : {0.5, 1.0, 2.0})
    for (double r : {0.5, 1.0, 2.0}) {
      auto pE = params(1, q, r, 0.3, Variant::E, GrowthFunction::power(2 * q, 1));
      auto pN = pE;
      pN.variant = Variant::N;
      for (int t = 0; t < 5; ++t) {
        auto f = random_grid(1, 6, rng()), g = random_grid(1, 6, rng());
        EXPECT_TRUE(min_triangle_check(f, g, NormKind::Morrey, pE).holds());
        EXPECT_TRUE(min_triangle_check(f, g, NormKind::Space, pE).holds());
        EXPECT_TRUE(min_triangle_check(f, g, NormKind::Space, pN).holds());
        auto a = random_field(1, 0, 5, rng()), b = random_field(1, 0, 5, rng());
        EXPECT_TRUE(min_triangle_check(a, b, pE).holds());
        EXPECT_TRUE(min_triangle_check(a, b, pN).holds());
        checked += 5;
      }
    }
  EXPECT_EQ(checked, 225);
}

TEST(Triangle, Degenerate) {
  auto f = random_grid(1, 5, 1);
  GridFunction z(1, 5);
  auto p = params(1, 0.5, 0.5, 0, Variant::E, GrowthFunction::power(1, 1));
  auto t = min_triangle_check(f, z, NormKind::Space, p);
  EXPECT_NEAR(t.lhs, t.rhs, 1e-14 * t.rhs);
  auto u = min_triangle_check(f, f, NormKind::Morrey, p);
  EXPECT_NEAR(u.lhs, std::pow(2.0, u.w) * u.rhs / 2, 1e-13 * u.rhs);
}

TEST(Quark, NormIsWeightedSup) {
  QuarkCoeffs ql;
  ql.n = 1;
  ql.beta_cutoff = 2;
  auto p = params(1, 2, 2, 0.5, Variant::N, GrowthFunction::power(4, 1));
  for (int b = 0; b <= 2; ++b) ql.values[{b}] = random_field(1, 0, 4, 50 + b);
  double want = 0;
  for (int b = 0; b <= 2; ++b) want = std::max(want, std::exp2(1.5 * b) * seq_norm(ql.values[{b}], p).value);
  EXPECT_DOUBLE_EQ(quark_norm(ql, p, 1.5), want);
  ql.values[{3}] = CoeffField(1, 0, 1);
  EXPECT_THROW(quark_norm(ql, p, 1.5), domain_error);
}
