#pragma once

#include <array>

#include "atoms.hpp"

namespace morreykit {

/// Quark generator. psi is the tensor product of psi1(t) = 1 - S(|t|) on
/// [-1,1], S the C-infinity transition, so translates of psi sum to one and
/// supp psi = Q(1) = [-1,1]^n: R = 0 and rho = R + 1 = 1.
struct QuarkGen {
  int n = 1;
  double R = 0.0;
  int rho = 1;
  double eps = 0.5;
  double d = 0.0;  ///< supp (beta qu)_{nu m} lies in d Q_{nu m}

  explicit QuarkGen(int dim = 1) : n(dim) {
    // support [m-1, m+1] against Q_{nu m} = [m, m+1]: half-width about the
    // center m + 1/2 is 3/2 cells
    const double lo = -1.0, hi = 1.0;
    d = 2.0 * std::max(std::abs(lo - 0.5), std::abs(hi - 0.5));
    if (!(rho > R)) throw precondition_error("QuarkGen: need rho > R");
  }

  static double psi1(double t) {
    double a = std::abs(t);
    return a >= 1.0 ? 0.0 : 1.0 - smooth_transition(a);
  }
  /// t^b psi1(t)
  static double profile(int b, double t) {
    double v = psi1(t);
    return v == 0.0 ? 0.0 : v * std::pow(t, b);
  }
};

namespace detail {
inline double log_factorial(const std::vector<int>& beta) {
  double s = 0;
  for (int b : beta) s += std::lgamma(b + 1.0);
  return s;
}
}  // namespace detail

/// lambda^beta at level nu + rho for every |beta| <= beta_cutoff; values[beta]
/// is a CoeffField with levels 0..numax+rho (levels below rho stay zero).
/// Lambda keeps the band samples tau_nu(D) f(2^-nu m) at levels 0..numax.
struct QuarkAnalysis {
  QuarkCoeffs coeffs;
  CoeffField Lambda;
  int numax = 0;
};

/// Highest band index carrying energy above `rel` of the peak.
inline int highest_band(const BandSet& bs, bool homogeneous, double rel = 1e-13) {
  std::vector<double> e(bs.top() + 1);
  double peak = 0;
  for (int j = 0; j <= bs.top(); ++j) {
    e[j] = bs.band(j, homogeneous).max_abs();
    peak = std::max(peak, e[j]);
  }
  int top = 0;
  for (int j = 0; j <= bs.top(); ++j)
    if (e[j] > rel * peak) top = j;
  return top;
}

/// Taylor coefficients of the sampling expansion:
///   lambda^beta_{nu+rho,l} = 2^{-rho|beta|}/beta! sum_m Lambda_{nu m} d^beta k_nu(2^-rho l - m),
/// k_nu(y) = K_nu(2^-nu y), K_nu the periodized kernel with Fourier
/// coefficients 2^{-nu n} kappa(2^-nu xi). The sum over m is a circular
/// convolution on the level-(nu+rho) lattice, done by FFT. In homogeneous
/// mode band 0 is tau_0 instead of theta, so the mean is dropped.
inline QuarkAnalysis quark_analyze(const GridFunction& f, const QuarkGen& gen, const FilterBank& bank, int beta_cutoff,
                                   bool homogeneous = false) {
  if (f.n != gen.n) throw domain_error("quark_analyze: dimension mismatch");
  if (beta_cutoff < 0) throw domain_error("quark_analyze: beta_cutoff must be >= 0");
  const int n = f.n, J = f.J, rho = gen.rho;
  BandSet bs(f, bank);
  const int numax = highest_band(bs, homogeneous);
  if (numax + rho > J)
    throw precondition_error("quark_analyze: band " + std::to_string(numax) + " needs level " +
                             std::to_string(numax + rho) + " beyond the grid");
  QuarkAnalysis out;
  out.numax = numax;
  out.Lambda = CoeffField(n, 0, numax);
  out.coeffs.n = n;
  out.coeffs.beta_cutoff = beta_cutoff;
  out.coeffs.rho = rho;
  auto betas = multi_indices(n, beta_cutoff);
  for (auto& b : betas) out.coeffs.values.emplace(b, CoeffField(n, 0, numax + rho));
  for (int nu = 0; nu <= numax; ++nu) {
    GridFunction band = bs.band(nu, homogeneous);
    // Lambda_{nu m} = band(2^-nu m)
    const int step = 1 << (J - nu);
    const std::size_t cnt = std::size_t(1) << (nu * n);
    std::vector<int> m(n);
    for (std::size_t flat = 0; flat < cnt; ++flat) {
      std::size_t t = flat, g = 0;
      for (int k = n - 1; k >= 0; --k) m[k] = int(t % (std::size_t(1) << nu)), t >>= nu;
      for (int k = 0; k < n; ++k) g = (g << J) | std::size_t(m[k] * step);
      out.Lambda.at(nu, flat) = band.data[g];
    }
    // upsample onto the fine lattice
    const int Jf = nu + rho;
    GridFunction up(n, Jf);
    for (std::size_t flat = 0; flat < cnt; ++flat) {
      std::size_t t = flat, g = 0;
      for (int k = n - 1; k >= 0; --k) m[k] = int(t % (std::size_t(1) << nu)), t >>= nu;
      for (int k = 0; k < n; ++k) g = (g << Jf) | std::size_t(m[k] << rho);
      up.data[g] = out.Lambda.at(nu, flat);
    }
    auto spec = fft_forward(up);
    const double kscale = std::ldexp(1.0, -nu * n) * double(up.size());
    std::vector<cplx> base(spec.size());
    for_each_frequency(n, Jf, [&](std::size_t i, const double* xi, const int*) {
      double buf[8];
      for (int k = 0; k < n; ++k) buf[k] = std::ldexp(xi[k], -nu);
      base[i] = spec[i] * bank.kappa(buf, n) * kscale;
    });
    for (auto& beta : betas) {
      const int a = abs_multi(beta);
      std::vector<cplx> s = base;
      for_each_frequency(n, Jf, [&](std::size_t i, const double* xi, const int*) {
        if (s[i] == 0.0) return;
        cplx mult = 1.0;
        for (int k = 0; k < n; ++k)
          if (beta[k]) mult *= std::pow(cplx(0.0, xi[k]), beta[k]);
        s[i] *= mult;
      });
      GridFunction dk = fft_inverse(std::move(s), n, Jf);
      // 2^{-rho|beta|}/beta! and the chain-rule factor 2^{-nu|beta|}, in log space
      const double w = std::exp(-double(rho + nu) * a * std::log(2.0) - detail::log_factorial(beta));
      auto& fld = out.coeffs.values.at(beta);
      for (std::size_t i = 0; i < dk.size(); ++i) fld.at(Jf, i) = w * dk.data[i];
    }
  }
  return out;
}

/// Same coefficients from the equivalent closed form
///   lambda^beta_{nu+rho,l} = 2^{-(rho+nu)|beta|}/beta! (d^beta tau_nu(D) f)(2^{-nu-rho} l),
/// used as an independent cross-check of the lattice convolution.
inline QuarkCoeffs quark_coefficients_direct(const GridFunction& f, const QuarkGen& gen, const FilterBank& bank,
                                             int beta_cutoff, bool homogeneous = false) {
  const int n = f.n, J = f.J, rho = gen.rho;
  BandSet bs(f, bank);
  const int numax = highest_band(bs, homogeneous);
  QuarkCoeffs out;
  out.n = n;
  out.beta_cutoff = beta_cutoff;
  out.rho = rho;
  auto betas = multi_indices(n, beta_cutoff);
  for (auto& b : betas) out.values.emplace(b, CoeffField(n, 0, numax + rho));
  std::vector<int> l(n);
  for (int nu = 0; nu <= numax; ++nu) {
    GridFunction band = bs.band(nu, homogeneous);
    const int Jf = nu + rho, step = 1 << (J - Jf);
    for (auto& beta : betas) {
      const int a = abs_multi(beta);
      GridFunction d = a == 0 ? band : spectral_derivative(band, beta);
      const double w = std::exp(-double(rho + nu) * a * std::log(2.0) - detail::log_factorial(beta));
      auto& fld = out.values.at(beta);
      const std::size_t cnt = std::size_t(1) << (Jf * n);
      for (std::size_t flat = 0; flat < cnt; ++flat) {
        std::size_t t = flat, g = 0;
        for (int k = n - 1; k >= 0; --k) l[k] = int(t % (std::size_t(1) << Jf)), t >>= Jf;
        for (int k = 0; k < n; ++k) g = (g << J) | std::size_t(l[k] * step);
        fld.at(Jf, flat) = w * d.data[g];
      }
    }
  }
  return out;
}

/// Adds sum_l c_l prod_k g_k(2^j x_k - l_k) onto out, with c on the level-j
/// lattice and g_k(t) = t^{beta_k} psi1(t). Separable: one axis at a time.
inline void add_quark_level(GridFunction& out, const std::vector<cplx>& c, int j, const std::vector<int>& beta) {
  const int n = out.n, J = out.J, G = out.G(), M = 1 << j;
  if (j > J || j < 1) throw domain_error("add_quark_level: level outside 1..J");
  const int s = G / M;
  // per-axis tables: for grid index i, the two lattice points l0 = floor(i/s), l0+1
  std::vector<std::vector<std::array<double, 2>>> tab(n, std::vector<std::array<double, 2>>(G));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < G; ++i) {
      double t = double(i) / s;
      int l0 = i / s;
      tab[k][i] = {QuarkGen::profile(beta[k], t - l0), QuarkGen::profile(beta[k], t - (l0 + 1))};
    }
  // expand axis by axis: shape goes from M^n to G^n
  std::vector<int> dims(n, M);
  std::vector<cplx> cur = c;
  for (int ax = 0; ax < n; ++ax) {
    std::vector<int> nd = dims;
    nd[ax] = G;
    std::size_t inner = 1, outer = 1;
    for (int k = ax + 1; k < n; ++k) inner *= nd[k];
    for (int k = 0; k < ax; ++k) outer *= nd[k];
    std::vector<cplx> next(outer * G * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (int i = 0; i < G; ++i) {
        int l0 = i / s, l1 = (l0 + 1) % M;
        double w0 = tab[ax][i][0], w1 = tab[ax][i][1];
        const cplx* a0 = &cur[(o * M + l0) * inner];
        const cplx* a1 = &cur[(o * M + l1) * inner];
        cplx* dst = &next[(o * G + i) * inner];
        for (std::size_t r = 0; r < inner; ++r) dst[r] = w0 * a0[r] + w1 * a1[r];
      }
    cur.swap(next);
    dims = nd;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += cur[i];
}

/// sum_beta sum_nu sum_l lambda^beta_{nu l} (2^nu x - l)^beta psi(2^nu x - l), beta-major.
inline GridFunction quark_synthesize(const QuarkCoeffs& q, int J) {
  if (!(q.rho > 0)) throw precondition_error("quark_synthesize: need rho > R");
  GridFunction out(q.n, J);
  for (auto& [beta, fld] : q.values)
    for (int j = std::max(fld.jmin, 1); j <= fld.jmax; ++j) {
      if (j > J) throw precondition_error("quark_synthesize: level beyond the grid");
      const auto& lv = fld.level(j);
      bool any = false;
      for (auto& v : lv) any = any || v != 0.0;
      if (any) add_quark_level(out, lv, j, beta);
    }
  return out;
}

/// Relative L2 residual of the truncated quark expansion.
inline double quark_residual(const GridFunction& f, const QuarkCoeffs& q, bool homogeneous = false) {
  GridFunction target = f;
  if (homogeneous) {
    cplx m = f.integral();
    for (auto& v : target.data) v -= m;
  }
  double nt = target.l2();
  if (nt == 0) return 0.0;
  return (quark_synthesize(q, f.J) - target).l2() / nt;
}

/// Keeps only |beta| <= cutoff.
inline QuarkCoeffs truncate_beta(const QuarkCoeffs& q, int cutoff) {
  QuarkCoeffs out = q;
  out.beta_cutoff = std::min(cutoff, q.beta_cutoff);
  for (auto it = out.values.begin(); it != out.values.end();)
    it = abs_multi(it->first) > cutoff ? out.values.erase(it) : std::next(it);
  return out;
}

/// Single quark (beta qu)_{j m} as a grid function.
inline GridFunction quark_function(int n, int J, int j, const std::vector<std::int64_t>& m, const std::vector<int>& beta) {
  GridFunction out(n, J);
  std::vector<cplx> c(std::size_t(1) << (j * n), 0.0);
  c[flat_index(m, j)] = 1.0;
  add_quark_level(out, c, j, beta);
  return out;
}

/// max_beta ||lambda^beta|| 2^{rho|beta|} / ||Lambda||, the empirical constant
/// of the coefficient bound, measured in the sequence norm of p.
inline double quark_coefficient_constant(const QuarkAnalysis& qa, const SpaceParams& p) {
  double den = seq_norm(qa.Lambda, p).value;
  if (den == 0) return 0.0;
  double best = 0;
  for (auto& [beta, fld] : qa.coeffs.values) {
    double v = seq_norm(fld, p).value * std::exp2(qa.coeffs.rho * abs_multi(beta));
    best = std::max(best, v / den);
  }
  return best;
}

}  // namespace morreykit
