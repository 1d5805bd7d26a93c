#pragma once

#include <fftw3.h>

#include <complex>
#include <functional>
#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "util.hpp"

namespace morreykit {

using cplx = std::complex<double>;

/// Complex samples on the uniform periodic grid over [0,1)^n with G = 2^J
/// points per axis, row-major with the last axis fastest.
struct GridFunction {
  int n = 1;
  int J = 0;
  std::vector<cplx> data;

  GridFunction() = default;
  GridFunction(int dim, int level) : n(dim), J(level), data(std::size_t(1) << (level * dim)) {
    if (dim < 1) throw domain_error("GridFunction: dimension must be positive");
    if (level < 0 || level * dim > 30) throw domain_error("GridFunction: unsupported resolution");
  }

  int G() const { return 1 << J; }
  double h() const { return std::ldexp(1.0, -J); }
  std::size_t size() const { return data.size(); }
  cplx& operator[](std::size_t i) { return data[i]; }
  const cplx& operator[](std::size_t i) const { return data[i]; }

  /// Integer coordinates of a flat index.
  void coords(std::size_t flat, int* out) const {
    for (int k = n - 1; k >= 0; --k) {
      out[k] = static_cast<int>(flat & (G() - 1));
      flat >>= J;
    }
  }

  std::size_t flat(const int* c) const {
    std::size_t f = 0;
    for (int k = 0; k < n; ++k) f = (f << J) | static_cast<std::size_t>(((c[k] % G()) + G()) % G());
    return f;
  }

  bool same_grid(const GridFunction& o) const { return n == o.n && J == o.J; }

  GridFunction& operator+=(const GridFunction& o) {
    if (!same_grid(o)) throw domain_error("grid mismatch");
    for (std::size_t i = 0; i < size(); ++i) data[i] += o.data[i];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    if (!same_grid(o)) throw domain_error("grid mismatch");
    for (std::size_t i = 0; i < size(); ++i) data[i] -= o.data[i];
    return *this;
  }
  GridFunction& operator*=(cplx c) {
    for (auto& v : data) v *= c;
    return *this;
  }
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(cplx c, GridFunction a) { return a *= c; }

  double max_abs() const {
    double m = 0;
    for (auto& v : data) m = std::max(m, std::abs(v));
    return m;
  }

  /// (h^n sum |f|^2)^(1/2)
  double l2() const {
    KahanSum s;
    for (auto& v : data) s.add(std::norm(v));
    return std::sqrt(s.value() * std::pow(h(), n));
  }

  cplx integral() const {
    KahanSum re, im;
    for (auto& v : data) {
      re.add(v.real());
      im.add(v.imag());
    }
    double w = std::pow(h(), n);
    return {re.value() * w, im.value() * w};
  }
};

inline GridFunction abs_pow(const GridFunction& f, double u) {
  GridFunction g = f;
  for (auto& v : g.data) v = std::pow(std::abs(v), u);
  return g;
}

/// Signed mode number of DFT index i on a G-point axis.
inline int mode_of(int i, int G) { return i < G / 2 ? i : i - G; }

// FFTW plans are cached per (n, J, sign); the planner is not thread safe, so
// creation is serialized. Execution through the new-array interface is safe.
class FftPlans {
 public:
  static fftw_plan get(int n, int J, int sign) {
    static FftPlans inst;
    std::lock_guard<std::mutex> lock(inst.mu_);
    auto key = std::make_tuple(n, J, sign);
    auto it = inst.plans_.find(key);
    if (it != inst.plans_.end()) return it->second;
    std::vector<int> dims(n, 1 << J);
    std::size_t total = std::size_t(1) << (n * J);
    fftw_complex* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(n, dims.data(), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    inst.plans_[key] = p;
    return p;
  }
  ~FftPlans() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

/// Unnormalized forward DFT: F[k] = sum_x f[x] e^{-2 pi i k.x}.
inline std::vector<cplx> fft_forward(const GridFunction& f) {
  std::vector<cplx> out = f.data;
  auto* p = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(FftPlans::get(f.n, f.J, FFTW_FORWARD), p, p);
  return out;
}

/// Inverse of fft_forward (includes the 1/G^n factor).
inline GridFunction fft_inverse(std::vector<cplx> spec, int n, int J) {
  GridFunction g(n, J);
  if (spec.size() != g.size()) throw domain_error("fft_inverse: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_execute_dft(FftPlans::get(n, J, FFTW_BACKWARD), p, p);
  double s = 1.0 / double(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) g.data[i] = spec[i] * s;
  return g;
}

/// Calls fn(flat, xi) for each DFT index, xi = 2 pi k the angular frequency.
template <class Fn>
void for_each_frequency(int n, int J, Fn&& fn) {
  const int G = 1 << J;
  std::size_t total = std::size_t(1) << (n * J);
  std::vector<double> xi(n);
  std::vector<int> c(n, 0);
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t t = f;
    for (int k = n - 1; k >= 0; --k) {
      c[k] = static_cast<int>(t & (G - 1));
      t >>= J;
    }
    for (int k = 0; k < n; ++k) xi[k] = 2.0 * M_PI * mode_of(c[k], G);
    fn(f, xi.data(), c.data());
  }
}

/// Spectral derivative d^alpha f (alpha has n entries).
inline GridFunction spectral_derivative(const GridFunction& f, const std::vector<int>& alpha) {
  auto spec = fft_forward(f);
  const int G = f.G();
  for_each_frequency(f.n, f.J, [&](std::size_t i, const double* xi, const int* c) {
    cplx m = 1.0;
    for (int k = 0; k < f.n; ++k) {
      if (alpha[k] == 0) continue;
      if (alpha[k] % 2 == 1 && c[k] == G / 2) {
        m = 0.0;
        break;
      }
      m *= std::pow(cplx(0.0, xi[k]), alpha[k]);
    }
    spec[i] *= m;
  });
  return fft_inverse(std::move(spec), f.n, f.J);
}

/// All multi-indices of length n with |alpha| <= order, graded order.
inline std::vector<std::vector<int>> multi_indices(int n, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(n, 0);
  for (int total = 0; total <= order; ++total) {
    std::function<void(int, int)> rec = [&](int k, int left) {
      if (k == n - 1) {
        a[k] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[k] = v;
        rec(k + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

inline int abs_multi(const std::vector<int>& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

inline GridFunction translate(const GridFunction& f, const std::vector<int>& shift) {
  GridFunction g(f.n, f.J);
  std::vector<int> c(f.n);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.coords(i, c.data());
    for (int k = 0; k < f.n; ++k) c[k] += shift[k];
    g.data[g.flat(c.data())] = f.data[i];
  }
  return g;
}

}  // namespace morreykit
