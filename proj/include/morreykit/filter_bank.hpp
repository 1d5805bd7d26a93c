#pragma once

#include <functional>
#include <string>

#include "grid_function.hpp"

namespace morreykit {

/// Degree-7 smoothstep: 0 at t<=0, 1 at t>=1, three continuous derivatives.
inline double smoothstep7(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  double t2 = t * t;
  return t2 * t2 * (35.0 - 84.0 * t + 70.0 * t2 - 20.0 * t2 * t);
}

/// 1 on [0,a], 0 on [b,inf), monotone in between.
inline double plateau(double u, double a, double b) { return 1.0 - smoothstep7((u - a) / (b - a)); }

/// C-infinity transition e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}), symmetric about 1/2.
inline double smooth_transition(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

using Window = std::function<double(const double* xi, int n)>;

inline double sup_norm(const double* xi, int n) {
  double m = 0;
  for (int k = 0; k < n; ++k) m = std::max(m, std::abs(xi[k]));
  return m;
}

inline double euclid_norm(const double* xi, int n) {
  double m = 0;
  for (int k = 0; k < n; ++k) m += xi[k] * xi[k];
  return std::sqrt(m);
}

/// Littlewood-Paley windows: theta for the low band, tau_j(xi) = tau(2^-j xi)
/// for the others, kappa for sampling.
struct FilterBank {
  std::string name;
  Window theta, tau, kappa;
  bool partition = false;

  /// Highest band needed at resolution J: 2^{jmax+1} must exceed the largest
  /// represented |xi|_inf = pi G.
  static int top_level(int J) { return J + 1; }

  double window(int j, const double* xi, int n, bool homogeneous) const {
    if (j == 0 && !homogeneous) return theta(xi, n);
    double buf[8];
    double s = std::ldexp(1.0, -j);
    for (int k = 0; k < n; ++k) buf[k] = xi[k] * s;
    return tau(buf, n);
  }
};

/// theta = tensor plateau equal to 1 on Q(2) and 0 off Q(3);
/// tau_j = theta(2^-j .) - theta(2^{-j+1} .), so the bank sums to one.
inline FilterBank default_bank() {
  FilterBank b;
  b.name = "partition";
  b.partition = true;
  b.theta = [](const double* xi, int n) {
    double v = 1.0;
    for (int k = 0; k < n; ++k) v *= plateau(std::abs(xi[k]), 2.0, 3.0);
    return v;
  };
  auto th = b.theta;
  b.tau = [th](const double* xi, int n) {
    double two[8];
    for (int k = 0; k < n; ++k) two[k] = 2.0 * xi[k];
    return th(xi, n) - th(two, n);
  };
  b.kappa = [](const double* xi, int n) {
    double v = 1.0;
    for (int k = 0; k < n; ++k) v *= plateau(std::abs(xi[k]), 3.0, 3.01);
    return v;
  };
  return b;
}

/// A second admissible bank that is not a partition of unity: a radial low
/// window of height 0.7 and an annular window with shifted edges.
inline FilterBank alternate_bank() {
  FilterBank b = default_bank();
  b.name = "alternate";
  b.partition = false;
  b.theta = [](const double* xi, int n) { return 0.7 * plateau(euclid_norm(xi, n), 2.9, 3.6); };
  b.tau = [](const double* xi, int n) {
    double u = sup_norm(xi, n);
    return plateau(u, 2.2, 3.2) * (1.0 - plateau(u, 0.6, 0.95));
  };
  return b;
}

struct BankCheck {
  bool zero_outside_support = true;  ///< tau vanishes near 0
  bool theta_positive = true;        ///< theta > 0 on Q(2)
  bool tau_positive = true;          ///< tau > 0 on Q(2) \ Q(1)
  double partition_error = 0.0;      ///< max |theta + sum tau_j - 1| (partition banks)
  bool ok() const { return zero_outside_support && theta_positive && tau_positive; }
};

/// Admissibility checked on a fine sample of frequencies and on the DFT grid.
inline BankCheck check_bank(const FilterBank& b, int n, int J) {
  BankCheck c;
  const int M = 81;
  std::vector<double> xi(n);
  std::vector<int> idx(n, 0);
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= M;
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t t = f;
    for (int k = 0; k < n; ++k) {
      idx[k] = static_cast<int>(t % M);
      t /= M;
      xi[k] = -2.0 + 4.0 * idx[k] / (M - 1);
    }
    double s = sup_norm(xi.data(), n);
    if (b.theta(xi.data(), n) <= 0) c.theta_positive = false;
    if (s > 1.0 + 1e-9 && b.tau(xi.data(), n) <= 0) c.tau_positive = false;
    double small[8];
    for (int k = 0; k < n; ++k) small[k] = xi[k] * 0.15;
    if (b.tau(small, n) != 0.0) c.zero_outside_support = false;
  }
  if (b.partition) {
    int top = FilterBank::top_level(J);
    for_each_frequency(n, J, [&](std::size_t, const double* x, const int*) {
      double s = 0;
      for (int j = 0; j <= top; ++j) s += b.window(j, x, n, false);
      c.partition_error = std::max(c.partition_error, std::abs(s - 1.0));
    });
  }
  return c;
}

/// Bands of one function, sharing a single forward transform.
class BandSet {
 public:
  BandSet(const GridFunction& f, const FilterBank& bank) : n_(f.n), J_(f.J), bank_(&bank), spec_(fft_forward(f)) {}

  int n() const { return n_; }
  int J() const { return J_; }
  int top() const { return FilterBank::top_level(J_); }
  const std::vector<cplx>& spectrum() const { return spec_; }

  GridFunction band(int j, bool homogeneous = false) const {
    if (j > top()) throw domain_error("band: level above the represented range");
    if (!homogeneous && j < 0) throw domain_error("band: negative level in inhomogeneous mode");
    std::vector<cplx> s = spec_;
    for_each_frequency(n_, J_, [&](std::size_t i, const double* xi, const int*) {
      s[i] *= bank_->window(j, xi, n_, homogeneous);
    });
    return fft_inverse(std::move(s), n_, J_);
  }

  GridFunction multiplier(const Window& m) const {
    std::vector<cplx> s = spec_;
    for_each_frequency(n_, J_, [&](std::size_t i, const double* xi, const int*) { s[i] *= m(xi, n_); });
    return fft_inverse(std::move(s), n_, J_);
  }

 private:
  int n_, J_;
  const FilterBank* bank_;
  std::vector<cplx> spec_;
};

inline GridFunction band(const GridFunction& f, const FilterBank& bank, int j, bool homogeneous = false) {
  return BandSet(f, bank).band(j, homogeneous);
}

/// Fourier multiplier m(D) f.
inline GridFunction apply_multiplier(const GridFunction& f, const Window& m) { return BandSet(f, default_bank()).multiplier(m); }

}  // namespace morreykit
