#pragma once

#include "filter_bank.hpp"

namespace morreykit {

/// Largest |xi|_inf over modes carrying more than `rel` of the peak coefficient.
inline double spectral_extent(const std::vector<cplx>& spec, int n, int J, double rel = 1e-12) {
  double peak = 0;
  for (auto& v : spec) peak = std::max(peak, std::abs(v));
  double ext = 0;
  if (peak == 0) return 0;
  for_each_frequency(n, J, [&](std::size_t i, const double* xi, const int*) {
    if (std::abs(spec[i]) > rel * peak) ext = std::max(ext, sup_norm(xi, n));
  });
  return ext;
}

/// Rebuilds f from its samples f(2^-nu m) against the periodized kernel whose
/// Fourier coefficients are 2^{-nu n} kappa(2^-nu xi). Requires the spectrum
/// of f inside Q(3 2^nu).
inline GridFunction sample_expand(const GridFunction& f, const Window& kappa, int nu) {
  if (nu < 0 || nu > f.J) throw precondition_error("sample_expand: sampling level outside the grid");
  auto spec = fft_forward(f);
  if (spectral_extent(spec, f.n, f.J) > 3.0 * std::ldexp(1.0, nu) + 1e-9)
    throw precondition_error("sample_expand: spectrum exceeds Q(3 2^nu)");
  GridFunction a(f.n, f.J);
  const int step = 1 << (f.J - nu);
  std::vector<int> c(f.n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords(i, c.data());
    bool on = true;
    for (int k = 0; k < f.n; ++k) on = on && (c[k] % step == 0);
    if (on) a.data[i] = f.data[i];
  }
  auto as = fft_forward(a);
  const double scale = std::ldexp(1.0, -nu * f.n) * double(f.size());
  for_each_frequency(f.n, f.J, [&](std::size_t i, const double* xi, const int*) {
    double buf[8];
    for (int k = 0; k < f.n; ++k) buf[k] = std::ldexp(xi[k], -nu);
    as[i] *= kappa(buf, f.n) * scale;
  });
  return fft_inverse(std::move(as), f.n, f.J);
}

/// A function of xi sampled on the centered grid xi_i = (i - M/2) dxi per axis.
struct FrequencySamples {
  int n = 1;
  int M = 0;
  double dxi = 1.0;
  std::vector<cplx> values;

  template <class Fn>
  static FrequencySamples sample(Fn&& fn, int n, int M, double dxi) {
    FrequencySamples s{n, M, dxi, {}};
    std::size_t total = 1;
    for (int k = 0; k < n; ++k) total *= M;
    s.values.resize(total);
    std::vector<double> xi(n);
    for (std::size_t f = 0; f < total; ++f) {
      s.xi_of(f, xi.data());
      s.values[f] = fn(xi.data(), n);
    }
    return s;
  }

  void xi_of(std::size_t f, double* xi) const {
    for (int k = n - 1; k >= 0; --k) {
      xi[k] = (double(f % M) - M / 2) * dxi;
      f /= M;
    }
  }
};

/// ||(1+|xi|^2)^{nu/2} H||_{L^2} as a Riemann sum with cell volume dxi^n.
inline double sobolev_norm(const FrequencySamples& H, double nu) {
  KahanSum s;
  std::vector<double> xi(H.n);
  for (std::size_t f = 0; f < H.values.size(); ++f) {
    H.xi_of(f, xi.data());
    double r2 = 0;
    for (double v : xi) r2 += v * v;
    s.add(std::pow(1.0 + r2, nu) * std::norm(H.values[f]));
  }
  return std::sqrt(s.value() * std::pow(H.dxi, H.n));
}

}  // namespace morreykit
