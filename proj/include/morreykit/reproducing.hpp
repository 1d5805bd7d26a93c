#pragma once

#include <Eigen/Dense>

#include "grid_function.hpp"

namespace morreykit {

/// Periodic 1D kernel: taps[t] sits at grid offset lo + t. Convolution is
/// (d * f)(x) = h sum_t taps[t] f(x - (lo + t) h).
struct Kernel1D {
  int lo = 0;
  std::vector<double> taps;
  bool mean_projector = false;  ///< constant kernel, spectrum = [k == 0]
  bool zero = false;
};

/// Compactly supported even bump on (-1/4, 1/4).
inline double bump_quarter(double v) {
  double u = 16.0 * v * v;
  return u < 1.0 ? std::exp(-1.0 / (1.0 - u)) : 0.0;
}

/// Reproducing pair f = sum_j psi_j * phi_j * f on the grid.
///
/// D_j = 2^{jn} phi_0(2^j .) is a tensor bump supported in [-2^{-j-2}, 2^{-j-2}]^n
/// whose discrete moments equal delta_{beta,0} for |beta| <= L. Levels too fine
/// for the grid use the discrete delta. With phi_j = D_j - D_{j-1} and
/// psi_j = 2 delta - D_j - D_{j-1}, the products telescope:
///   sum_j psi_j^ phi_j^ = (1 - D_{floor-1}^)^2 - (1 - D_top^)^2 = 1,
/// and both phi_j and psi_j (j above the floor) have vanishing moments up to L.
class RychkovPair {
 public:
  RychkovPair(int n, int J, int L, bool homogeneous = false, int hom_floor = -4)
      : n_(n), J_(J), L_(L), hom_(homogeneous), floor_(homogeneous ? hom_floor : 0) {
    if (L < 0) throw domain_error("rychkov_pair: moment order must be >= 0");
    const int G = 1 << J;
    res_ = -1000;
    for (int j = 0; j <= J; ++j) {
      int w = 1 << std::max(J - j - 2, 0);
      if (J - j - 2 >= 0 && w >= L + 2) res_ = j;
    }
    if (res_ < 0) throw domain_error("rychkov_pair: grid too coarse for the requested moment order");
    top_ = res_ + 1;
    for (int j = floor_ - 1; j <= top_; ++j) kernels_.push_back(make_kernel(j));
    dhat_.resize(kernels_.size());
    for (std::size_t l = 0; l < kernels_.size(); ++l) {
      dhat_[l].resize(G);
      for (int k = 0; k < G; ++k) dhat_[l][k] = kernel_mode(kernels_[l], k);
    }
  }

  int n() const { return n_; }
  int J() const { return J_; }
  int L() const { return L_; }
  int floor_level() const { return floor_; }
  int top() const { return top_; }
  int resolved_top() const { return res_; }
  bool homogeneous() const { return hom_; }

  const Kernel1D& D(int j) const { return kernels_.at(j - floor_ + 1); }

  /// Spectrum of D_j at DFT index array c (length n).
  cplx D_hat(int j, const int* c) const {
    const auto& d = dhat_.at(j - floor_ + 1);
    cplx v = 1.0;
    for (int k = 0; k < n_; ++k) v *= d[c[k]];
    return v;
  }

  std::vector<cplx> phi_hat(int j) const {
    return spectrum([&](const int* c) { return D_hat(j, c) - D_hat(j - 1, c); });
  }
  std::vector<cplx> psi_hat(int j) const {
    return spectrum([&](const int* c) { return 2.0 - D_hat(j, c) - D_hat(j - 1, c); });
  }

  GridFunction apply(const GridFunction& f, const std::vector<cplx>& mult) const {
    auto s = fft_forward(f);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= mult[i];
    return fft_inverse(std::move(s), f.n, f.J);
  }

  /// Spatial kernel as a grid function (value at x, so sum * h^n = integral).
  GridFunction phi_kernel(int j) const { return kernel_from(phi_hat(j)); }
  GridFunction psi_kernel(int j) const { return kernel_from(psi_hat(j)); }

  /// Convolution with D_j along every axis, periodic.
  GridFunction convolve_D(const GridFunction& f, int j) const {
    const Kernel1D& d = D(j);
    GridFunction g = f;
    if (d.zero) {
      for (auto& v : g.data) v = 0;
      return g;
    }
    if (d.mean_projector) {
      cplx m = f.integral();
      for (auto& v : g.data) v = m;
      return g;
    }
    const int G = f.G();
    const double h = f.h();
    for (int ax = 0; ax < f.n; ++ax) {
      const std::size_t stride = std::size_t(1) << (f.J * (f.n - 1 - ax));
      std::vector<cplx> line(G);
      for (std::size_t base = 0; base < g.size(); ++base) {
        if ((base / stride) % G != 0) continue;
        for (int i = 0; i < G; ++i) {
          cplx acc = 0;
          for (std::size_t t = 0; t < d.taps.size(); ++t) {
            int src = ((i - (d.lo + int(t))) % G + G) % G;
            acc += d.taps[t] * g.data[base + src * stride];
          }
          line[i] = acc * h;
        }
        for (int i = 0; i < G; ++i) g.data[base + i * stride] = line[i];
      }
    }
    return g;
  }

 private:
  template <class Fn>
  std::vector<cplx> spectrum(Fn&& fn) const {
    std::vector<cplx> out(std::size_t(1) << (n_ * J_));
    for_each_frequency(n_, J_, [&](std::size_t i, const double*, const int* c) { out[i] = fn(c); });
    return out;
  }

  GridFunction kernel_from(std::vector<cplx> spec) const {
    GridFunction g = fft_inverse(std::move(spec), n_, J_);
    g *= std::pow(2.0, n_ * J_);  // spectrum = h^n sum k(x) e^{-i..}
    return g;
  }

  cplx kernel_mode(const Kernel1D& d, int k) const {
    const int G = 1 << J_;
    if (d.zero) return 0.0;
    if (d.mean_projector) return k == 0 ? 1.0 : 0.0;
    cplx s = 0;
    for (std::size_t t = 0; t < d.taps.size(); ++t) {
      double ang = -2.0 * M_PI * double(k) * double(d.lo + int(t)) / G;
      s += d.taps[t] * cplx(std::cos(ang), std::sin(ang));
    }
    return s / double(G);
  }

  Kernel1D make_kernel(int j) const {
    const int G = 1 << J_;
    const double h = 1.0 / G;
    Kernel1D d;
    if (j == floor_ - 1) {
      if (hom_)
        d.mean_projector = true;
      else
        d.zero = true;
      return d;
    }
    if (j > res_) {
      d.lo = 0;
      d.taps = {double(G)};
      return d;
    }
    if (j < 0) {
      // Periodized wide bump, normalized to unit mean.
      d.lo = -G / 2;
      d.taps.assign(G, 0.0);
      double sc = std::ldexp(1.0, j);
      for (int t = 0; t < G; ++t) {
        double x = (d.lo + t) * h;
        double acc = 0;
        int reach = static_cast<int>(std::ceil(0.25 / sc)) + 2;
        for (int p = -reach; p <= reach; ++p) acc += sc * bump_quarter(sc * (x + p));
        d.taps[t] = acc;
      }
      double sum = 0;
      for (double v : d.taps) sum += v * h;
      for (double& v : d.taps) v /= sum;
      return d;
    }
    const int w = 1 << (J_ - j - 2);
    d.lo = -w;
    const int m = 2 * w + 1;
    std::vector<double> v(m), b(m);
    for (int t = 0; t < m; ++t) {
      v[t] = std::ldexp(double(d.lo + t) * h, j);
      b[t] = bump_quarter(v[t]);
    }
    const int K = L_ + 1;
    Eigen::MatrixXd A(K, K);
    for (int r = 0; r < K; ++r)
      for (int c = 0; c < K; ++c) {
        double s = 0;
        for (int t = 0; t < m; ++t) s += std::pow(v[t], r + c) * b[t];
        A(r, c) = s;
      }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
    rhs(0) = 1.0;
    Eigen::VectorXd coef = A.colPivHouseholderQr().solve(rhs);
    d.taps.assign(m, 0.0);
    double sum = 0;
    for (int t = 0; t < m; ++t) {
      double p = 0;
      for (int l = K - 1; l >= 0; --l) p = p * v[t] + coef(l);
      d.taps[t] = b[t] * p;
      sum += d.taps[t] * h;
    }
    for (double& x : d.taps) x /= sum;
    return d;
  }

  int n_, J_, L_;
  bool hom_;
  int floor_;
  int res_ = 0, top_ = 0;
  std::vector<Kernel1D> kernels_;
  std::vector<std::vector<cplx>> dhat_;
};

inline RychkovPair rychkov_pair(int L, int n, int J, bool homogeneous = false, int hom_floor = -4) {
  return RychkovPair(n, J, L, homogeneous, hom_floor);
}

/// Discrete moment h^n sum_x x^beta k(x), with x the signed torus coordinate.
inline cplx discrete_moment(const GridFunction& k, const std::vector<int>& beta) {
  const int G = k.G();
  std::vector<int> c(k.n);
  KahanSum re, im;
  for (std::size_t i = 0; i < k.size(); ++i) {
    k.coords(i, c.data());
    double w = 1;
    for (int a = 0; a < k.n; ++a) w *= std::pow(double(mode_of(c[a], G)) / G, beta[a]);
    re.add(w * k.data[i].real());
    im.add(w * k.data[i].imag());
  }
  double s = std::pow(k.h(), k.n);
  return {re.value() * s, im.value() * s};
}

}  // namespace morreykit
