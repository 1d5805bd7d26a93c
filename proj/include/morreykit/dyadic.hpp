#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "util.hpp"

namespace morreykit {

using Index = std::vector<std::int64_t>;

/// Q_{jm} = prod_k [m_k 2^-j, (m_k+1) 2^-j). Levels below zero are cubes
/// larger than the torus; they are stored with index 0.
struct DyadicCube {
  int j = 0;
  Index m;

  int dim() const { return static_cast<int>(m.size()); }
  double side() const { return std::ldexp(1.0, -j); }
  double volume() const { return std::pow(side(), dim()); }
  std::vector<double> center() const {
    std::vector<double> c(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) c[k] = (m[k] + 0.5) * side();
    return c;
  }
  bool operator==(const DyadicCube& o) const { return j == o.j && m == o.m; }
  bool operator<(const DyadicCube& o) const { return j != o.j ? j < o.j : m < o.m; }
};

inline std::int64_t wrap_index(std::int64_t m, int j) {
  if (j <= 0) return 0;
  std::int64_t period = std::int64_t(1) << j;
  m %= period;
  return m < 0 ? m + period : m;
}

/// Reduce the index modulo 2^j (periodic lattice).
inline DyadicCube periodic(DyadicCube q) {
  for (auto& v : q.m) v = wrap_index(v, q.j);
  return q;
}

/// Axis-aligned box given by center and half widths.
struct Box {
  std::vector<double> center, half;

  std::vector<double> lo() const {
    std::vector<double> v(center.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = center[k] - half[k];
    return v;
  }
  std::vector<double> hi() const {
    std::vector<double> v(center.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = center[k] + half[k];
    return v;
  }
  double volume() const {
    double v = 1;
    for (double h : half) v *= 2 * h;
    return v;
  }
};

inline Box dilate(const DyadicCube& q, double d) {
  if (!(d > 0)) throw domain_error("dilate: factor must be positive");
  Box b;
  b.center = q.center();
  b.half.assign(q.m.size(), 0.5 * d * q.side());
  return b;
}

struct TraceBoxes {
  Box E, F, G;
};

/// E(S) = S x (l, 2l), F(S) = S x (0, 2l), G(S) = S x (0, l) for S in dimension n-1.
inline TraceBoxes trace_boxes(const DyadicCube& s) {
  double l = s.side();
  Box base = dilate(s, 1.0);
  auto make = [&](double a, double b) {
    Box x = base;
    x.center.push_back(0.5 * (a + b));
    x.half.push_back(0.5 * (b - a));
    return x;
  };
  return {make(l, 2 * l), make(0, 2 * l), make(0, l)};
}

inline DyadicCube ancestor(const DyadicCube& q, int level) {
  if (level > q.j) throw domain_error("ancestor: target level is finer than the cube");
  DyadicCube a{level, q.m};
  if (level <= 0) {
    for (auto& v : a.m) v = 0;
    return a;
  }
  int shift = q.j - level;
  for (auto& v : a.m) v >>= shift;  // arithmetic shift = floor division
  return a;
}

inline std::string cube_literal(const DyadicCube& q) {
  std::ostringstream os;
  os << q.j << ':';
  for (std::size_t k = 0; k < q.m.size(); ++k) os << (k ? "," : "") << q.m[k];
  return os.str();
}

inline DyadicCube parse_cube(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw domain_error("cube literal needs 'j:m1,...,mn': " + s);
  DyadicCube q;
  try {
    q.j = std::stoi(s.substr(0, colon));
    std::stringstream ss(s.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) q.m.push_back(std::stoll(tok));
  } catch (const std::exception&) {
    throw domain_error("malformed cube literal: " + s);
  }
  if (q.m.empty()) throw domain_error("cube literal has no index: " + s);
  return q;
}

/// Enumerates periodic lattice levels floor..depth in dimension n.
struct CubeLattice {
  int n = 1;
  int depth = 0;
  int homogeneous_floor = 0;
  bool periodic = true;

  std::int64_t cubes_at(int j) const { return j <= 0 ? 1 : std::int64_t(1) << (j * n); }

  /// Cube number `flat` at level j, row-major (last axis fastest).
  DyadicCube cube(int j, std::int64_t flat) const {
    DyadicCube q{j, Index(n, 0)};
    if (j <= 0) return q;
    std::int64_t side = std::int64_t(1) << j;
    for (int k = n - 1; k >= 0; --k) {
      q.m[k] = flat % side;
      flat /= side;
    }
    return q;
  }

  template <class Fn>
  void for_each(Fn&& fn) const {
    for (int j = homogeneous_floor; j <= depth; ++j)
      for (std::int64_t f = 0; f < cubes_at(j); ++f) fn(cube(j, f));
  }
};

/// Row-major flat index of cube index m at level j >= 0.
inline std::int64_t flat_index(const Index& m, int j) {
  std::int64_t f = 0;
  for (auto v : m) f = (f << j) + wrap_index(v, j);
  return f;
}

/// Flat grid indices (G points per axis) whose points x = i/G lie in the
/// half-open box [lo, hi) modulo the torus. Boxes wider than the torus
/// cover every point once.
inline std::vector<std::int64_t> box_cells(const Box& b, int G) {
  const int n = static_cast<int>(b.center.size());
  std::vector<std::vector<int>> axis(n);
  for (int k = 0; k < n; ++k) {
    double lo = b.center[k] - b.half[k], hi = b.center[k] + b.half[k];
    if (hi - lo >= 1.0) {
      for (int i = 0; i < G; ++i) axis[k].push_back(i);
      continue;
    }
    std::int64_t i0 = static_cast<std::int64_t>(std::ceil(lo * G - 1e-9));
    for (std::int64_t i = i0; i < hi * G - 1e-9; ++i) axis[k].push_back(static_cast<int>(((i % G) + G) % G));
  }
  std::vector<std::int64_t> out{0};
  for (int k = 0; k < n; ++k) {
    std::vector<std::int64_t> next;
    for (auto base : out)
      for (int i : axis[k]) next.push_back(base * G + i);
    out.swap(next);
  }
  return out;
}

}  // namespace morreykit
