#pragma once

#include <functional>
#include <string>

#include "norms.hpp"

namespace morreykit {

/// Seed of trial t under a master seed (counter mode).
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) { return mix64(master, trial + 0x51ed2701ULL); }

/// Coefficient law: Bernoulli(sparsity) support, log-normal magnitudes with
/// log-scale sigma, optional uniform phase. With per_level > 0 the support
/// probability at level j becomes min(1, per_level / #cubes), i.e. about
/// per_level nonzeros on every level.
struct FieldLaw {
  double sparsity = 0.2;
  double sigma = 1.0;
  bool complex_phase = false;
  double per_level = 0.0;

  std::string describe() const {
    std::string supp = per_level > 0 ? "bernoulli(" + fmt_double(per_level) + "/#cubes)" : "bernoulli(" + fmt_double(sparsity) + ")";
    return supp + "*lognormal(0," + fmt_double(sigma) + ")" + (complex_phase ? "*phase" : "");
  }

  FieldLaw at_level(std::size_t cubes) const {
    FieldLaw l = *this;
    if (per_level > 0) l.sparsity = std::min(1.0, per_level / double(cubes));
    return l;
  }
};

namespace detail {
inline std::uint64_t cube_key(std::uint64_t seed, int j, std::size_t flat) {
  return mix64(mix64(seed, static_cast<std::uint64_t>(j + 1024)), flat);
}
}  // namespace detail

/// Value drawn for cube (j, flat). It depends only on (seed, j, flat), so a
/// field at depth J+1 extends the one at depth J.
inline cplx law_value(const FieldLaw& law, std::uint64_t seed, int j, std::size_t flat) {
  std::uint64_t h = detail::cube_key(seed, j, flat);
  if (hash_unit(h) >= law.sparsity) return 0.0;
  double mag = std::exp(law.sigma * hash_normal(h + 1));
  if (!law.complex_phase) return mag;
  return std::polar(mag, 2 * M_PI * hash_unit(h + 2));
}

/// weight(j) rescales level j, e.g. 2^{-js}/phi(2^-j) to make every level
/// comparable in a norm with smoothness s.
inline CoeffField random_field(int n, int jmin, int jmax, const FieldLaw& law, std::uint64_t seed,
                               const std::function<double(int)>& weight = {}) {
  CoeffField lam(n, jmin, jmax);
  for (int j = jmin; j <= jmax; ++j) {
    double w = weight ? weight(j) : 1.0;
    auto& l = lam.level(j);
    FieldLaw lj = law.at_level(l.size());
    for (std::size_t f = 0; f < l.size(); ++f) l[f] = w * law_value(lj, seed, j, f);
  }
  return lam;
}

/// Level weight that makes a unit coefficient at level j contribute O(1) to a
/// sequence norm with smoothness s and growth phi.
inline std::function<double(int)> level_normalizer(const SpaceParams& p) {
  return [p](int j) { return std::exp2(-j * p.s) / p.phi(std::ldexp(1.0, -j)); };
}

/// Real trigonometric polynomial sum over |k|_inf <= kmax of c_k e^{2 pi i k.x},
/// real part taken. The coefficients depend only on (seed, k): the same
/// function is produced at every resolution with G > 2 kmax. decay damps
/// c_k by (1+|k|)^-decay.
inline GridFunction random_bandlimited(int n, int J, int kmax, std::uint64_t seed, double decay = 0.0) {
  const int G = 1 << J;
  if (2 * kmax >= G) throw domain_error("random_bandlimited: kmax too large for the grid");
  GridFunction f(n, J);
  std::vector<cplx> spec(f.size(), 0.0);
  const double scale = double(f.size());
  for_each_frequency(n, J, [&](std::size_t i, const double*, const int* c) {
    std::uint64_t key = seed;
    double r2 = 0;
    for (int k = 0; k < n; ++k) {
      int kk = mode_of(c[k], G);
      if (std::abs(kk) > kmax) return;
      key = mix64(key, static_cast<std::uint64_t>(kk + 4096));
      r2 += double(kk) * kk;
    }
    double damp = decay == 0 ? 1.0 : std::pow(1.0 + std::sqrt(r2), -decay);
    spec[i] = scale * damp * cplx(hash_normal(key), hash_normal(key ^ 0x9e3779b97f4a7c15ULL));
  });
  auto g = fft_inverse(std::move(spec), n, J);
  for (auto& v : g.data) v = v.real();
  return g;
}

/// Sum of `count` indicators of dyadic cubes of side 2^-jmax .. 1 with
/// log-normal heights. Exact on any grid with J >= jmax.
inline GridFunction random_indicators(int n, int J, int count, int jmax, std::uint64_t seed, double sigma = 1.0) {
  if (jmax > J) throw domain_error("random_indicators: cube level finer than the grid");
  GridFunction f(n, J);
  for (int t = 0; t < count; ++t) {
    std::uint64_t h = mix64(seed, static_cast<std::uint64_t>(t));
    int j = static_cast<int>(hash_unit(h) * (jmax + 1));
    DyadicCube Q{j, Index(n)};
    for (int k = 0; k < n; ++k) Q.m[k] = static_cast<std::int64_t>(hash_unit(h + 3 + k) * std::ldexp(1.0, j));
    double height = std::exp(sigma * hash_normal(h + 1));
    for (auto c : box_cells(dilate(Q, 1.0), f.G())) f.data[c] += height;
  }
  return f;
}

/// Named synthetic functions used by configs and the command line:
/// gaussian, mode, chirp, random (band-limited, kmax 8).
inline GridFunction preset_function(const std::string& name, int n, int J, std::uint64_t seed = 1) {
  GridFunction f(n, J);
  std::vector<int> c(n);
  const double h = f.h();
  if (name == "random" || name == "random-bandlimited") return random_bandlimited(n, J, std::min(8, (1 << J) / 2 - 1), seed);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords(i, c.data());
    double v = 1.0;
    for (int k = 0; k < n; ++k) {
      double x = c[k] * h;
      if (name == "gaussian") {
        double d = x - 0.5;
        v *= std::exp(-d * d / (2 * 0.06 * 0.06));
      } else if (name == "mode") {
        v *= std::cos(2 * M_PI * 3 * x);
      } else if (name == "chirp") {
        v *= std::sin(2 * M_PI * 4 * x + 3 * std::sin(2 * M_PI * x));
      } else {
        throw domain_error("unknown function preset '" + name + "'");
      }
    }
    f.data[i] = v;
  }
  return f;
}

}  // namespace morreykit
