#pragma once

#include <deque>

#include "grid_function.hpp"

namespace morreykit {

enum class CubeFamily {
  AllAligned,    ///< every grid-aligned cube of every side length
  DyadicShifted  ///< dyadic cubes plus the shifts by 1/3 and 2/3 of the side
};

namespace detail {

// Applies op to every line of a real n-dimensional array along axis `ax`.
template <class Op>
void for_each_line(std::vector<double>& a, int n, int J, int ax, Op&& op) {
  const std::size_t G = std::size_t(1) << J;
  const std::size_t stride = std::size_t(1) << (J * (n - 1 - ax));
  const std::size_t total = a.size();
  std::vector<double> line(G), out(G);
  for (std::size_t base = 0; base < total; ++base) {
    if ((base / stride) % G != 0) continue;
    for (std::size_t i = 0; i < G; ++i) line[i] = a[base + i * stride];
    op(line, out);
    for (std::size_t i = 0; i < G; ++i) a[base + i * stride] = out[i];
  }
}

// out[c] = sum_{t<L} in[c+t] (periodic)
inline void window_sum(const std::vector<double>& in, std::vector<double>& out, int L) {
  const int G = static_cast<int>(in.size());
  KahanSum s;
  for (int t = 0; t < L; ++t) s.add(in[t % G]);
  double run = s.value();
  // recompute periodically to bound drift
  for (int c = 0; c < G; ++c) {
    if (c % 64 == 0) {
      KahanSum r;
      for (int t = 0; t < L; ++t) r.add(in[(c + t) % G]);
      run = r.value();
    }
    out[c] = run;
    run += in[(c + L) % G] - in[c];
  }
}

// out[x] = max_{t<L} in[x-t] (periodic)
inline void window_max(const std::vector<double>& in, std::vector<double>& out, int L) {
  const int G = static_cast<int>(in.size());
  std::deque<int> dq;
  for (int i = -(L - 1); i < G; ++i) {
    int ii = ((i % G) + G) % G;
    while (!dq.empty() && in[((dq.back() % G) + G) % G] <= in[ii]) dq.pop_back();
    dq.push_back(i);
    while (dq.front() <= i - L) dq.pop_front();
    if (i >= 0) out[i] = in[((dq.front() % G) + G) % G];
  }
}

}  // namespace detail

/// Maximal function of a nonnegative real field sampled on the grid.
inline std::vector<double> maximal_real(const std::vector<double>& a, int n, int J,
                                        CubeFamily fam = CubeFamily::AllAligned) {
  const int G = 1 << J;
  std::vector<double> best = a;
  auto update = [&](const std::vector<double>& m) {
    for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::max(best[i], m[i]);
  };
  if (fam == CubeFamily::AllAligned) {
    for (int L = 2; L <= G; ++L) {
      std::vector<double> m = a;
      for (int ax = 0; ax < n; ++ax)
        detail::for_each_line(m, n, J, ax, [&](auto& in, auto& out) { detail::window_sum(in, out, L); });
      double inv = std::pow(double(L), -n);
      for (auto& v : m) v *= inv;
      for (int ax = 0; ax < n; ++ax)
        detail::for_each_line(m, n, J, ax, [&](auto& in, auto& out) { detail::window_max(in, out, L); });
      update(m);
    }
    return best;
  }
  for (int lev = J - 1; lev >= 0; --lev) {
    const int L = 1 << (J - lev);
    std::vector<int> offs{0, L / 3, (2 * L) / 3};
    for (std::size_t o = 0; o < offs.size(); ++o) {
      if (o && offs[o] == offs[o - 1]) continue;
      int off = offs[o];
      const std::size_t blocks_per_axis = G / L;
      std::vector<double> sums(std::size_t(1) << (lev * n), 0.0);
      std::vector<int> c(n);
      auto block_of = [&](std::size_t flat) {
        std::size_t t = flat, b = 0;
        for (int k = n - 1; k >= 0; --k) {
          c[k] = static_cast<int>(t & (G - 1));
          t >>= J;
        }
        for (int k = 0; k < n; ++k) b = b * blocks_per_axis + ((c[k] - off + G) % G) / L;
        return b;
      };
      for (std::size_t i = 0; i < a.size(); ++i) sums[block_of(i)] += a[i];
      double inv = std::pow(double(L), -n);
      for (std::size_t i = 0; i < a.size(); ++i) best[i] = std::max(best[i], sums[block_of(i)] * inv);
    }
  }
  return best;
}

inline GridFunction hl_maximal(const GridFunction& f, CubeFamily fam = CubeFamily::AllAligned) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.data[i]);
  auto m = maximal_real(a, f.n, f.J, fam);
  GridFunction g(f.n, f.J);
  for (std::size_t i = 0; i < m.size(); ++i) g.data[i] = m[i];
  return g;
}

/// (M|f|^eta)^(1/eta)
inline GridFunction powered_maximal(const GridFunction& f, double eta, CubeFamily fam = CubeFamily::AllAligned) {
  if (!(eta > 0)) throw domain_error("powered_maximal: eta must be positive");
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(std::abs(f.data[i]), eta);
  auto m = maximal_real(a, f.n, f.J, fam);
  GridFunction g(f.n, f.J);
  for (std::size_t i = 0; i < m.size(); ++i) g.data[i] = std::pow(m[i], 1.0 / eta);
  return g;
}

/// Torus distance between grid points given by integer offsets.
inline double torus_distance(const int* d, int n, int G) {
  double s = 0;
  for (int k = 0; k < n; ++k) {
    int a = ((d[k] % G) + G) % G;
    a = std::min(a, G - a);
    double x = double(a) / G;
    s += x * x;
  }
  return std::sqrt(s);
}

/// sup_y |b(y)| / (1 + 2^j d(x,y))^N by direct scan; b is an already
/// filtered band.
inline GridFunction peetre_of_band(const GridFunction& b, int j, double N) {
  if (!(N > 0)) throw domain_error("peetre_maximal: N must be positive");
  const int G = b.G(), n = b.n;
  const std::size_t total = b.size();
  std::vector<double> w(total);
  std::vector<int> c(n);
  for (std::size_t i = 0; i < total; ++i) {
    b.coords(i, c.data());
    w[i] = std::pow(1.0 + std::ldexp(torus_distance(c.data(), n, G), j), -N);
  }
  std::vector<double> mag(total);
  for (std::size_t i = 0; i < total; ++i) mag[i] = std::abs(b.data[i]);
  GridFunction out(n, b.J);
  std::vector<int> co(total * n);
  for (std::size_t i = 0; i < total; ++i) b.coords(i, &co[i * n]);
  std::vector<std::size_t> live;
  for (std::size_t y = 0; y < total; ++y)
    if (mag[y] != 0) live.push_back(y);
  const int mask = G - 1;
  for (std::size_t x = 0; x < total; ++x) {
    const int* cx = &co[x * n];
    double best = 0;
    for (std::size_t y : live) {
      const int* cy = &co[y * n];
      std::size_t idx = 0;
      for (int k = 0; k < n; ++k) idx = (idx << b.J) | static_cast<std::size_t>((cx[k] - cy[k]) & mask);
      double v = mag[y] * w[idx];
      if (v > best) best = v;
    }
    out.data[x] = best;
  }
  return out;
}

}  // namespace morreykit
