#pragma once

#include <map>
#include <string>

#include "dyadic.hpp"
#include "filter_bank.hpp"
#include "growth.hpp"

namespace morreykit {

/// Result of a Morrey sup together with the cube attaining it.
struct MorreySup {
  double value = 0.0;
  DyadicCube cube{0, {}};
};

/// Morrey sup of a cell-constant field given by a[c] = |g|^q on the 2^{Bn}
/// cells of level B. Cubes range over levels min_level..B; levels below 0
/// cover the whole torus. Cubes finer than B see constant values, so levels
/// B+1..B+fine contribute max_i phi(2^-i) * max_c a^{1/q}.
inline MorreySup morrey_pyramid(std::vector<double> a, int n, int B, double q, const GrowthFunction& phi,
                                int min_level = 0, int fine = 0) {
  if (!(q > 0)) throw domain_error("morrey: q must be positive");
  if (B < 0) throw domain_error("morrey: base level must be >= 0");
  MorreySup best;
  best.cube = DyadicCube{B, Index(n, 0)};
  auto consider = [&](int j, const std::vector<double>& lvl) {
    const double w = phi(std::ldexp(1.0, -j));
    std::size_t arg = 0;
    double m = -1;
    for (std::size_t i = 0; i < lvl.size(); ++i)
      if (lvl[i] > m) m = lvl[i], arg = i;
    double v = w * std::pow(std::max(m, 0.0), 1.0 / q);
    if (v > best.value) {
      best.value = v;
      CubeLattice lat{n, std::max(j, 0), 0, true};
      best.cube = lat.cube(std::max(j, 0), static_cast<std::int64_t>(arg));
      best.cube.j = j;
    }
  };
  for (int i = B + fine; i > B; --i) consider(i, a);
  consider(B, a);
  // coarser levels by averaging 2^n children
  std::vector<double> cur = std::move(a);
  for (int j = B - 1; j >= 0; --j) {
    const std::size_t side = std::size_t(1) << j, cside = side << 1;
    std::size_t total = std::size_t(1) << (j * n);
    std::vector<double> next(total, 0.0);
    std::vector<std::size_t> c(n);
    for (std::size_t f = 0; f < total; ++f) {
      std::size_t t = f;
      for (int k = n - 1; k >= 0; --k) c[k] = t % side, t /= side;
      double s = 0;
      for (std::size_t ch = 0; ch < (std::size_t(1) << n); ++ch) {
        std::size_t flat = 0;
        for (int k = 0; k < n; ++k) flat = flat * cside + 2 * c[k] + ((ch >> (n - 1 - k)) & 1);
        s += cur[flat];
      }
      next[f] = s / double(std::size_t(1) << n);
    }
    cur.swap(next);
    if (j >= min_level) consider(j, cur);
  }
  for (int j = -1; j >= min_level; --j) consider(j, cur);
  return best;
}

/// Generalized Morrey norm of a grid function; grid points are the finest cells.
inline MorreySup morrey_sup(const GridFunction& f, double q, const GrowthFunction& phi, int min_level = 0) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(std::abs(f.data[i]), q);
  return morrey_pyramid(std::move(a), f.n, f.J, q, phi, min_level);
}

inline double morrey_norm(const GridFunction& f, double q, const GrowthFunction& phi, int min_level = 0) {
  return morrey_sup(f, q, phi, min_level).value;
}

/// Same norm for a nonnegative real field.
inline double morrey_norm_real(const std::vector<double>& g, int n, int J, double q, const GrowthFunction& phi,
                               int min_level = 0) {
  std::vector<double> a(g.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(std::abs(g[i]), q);
  return morrey_pyramid(std::move(a), n, J, q, phi, min_level).value;
}

struct NormResult {
  double value = 0.0;
  std::vector<std::string> warnings;
  operator double() const { return value; }
};

namespace detail {
inline double lr_combine(const std::vector<double>& terms, double r) {
  if (std::isinf(r)) {
    double m = 0;
    for (double t : terms) m = std::max(m, t);
    return m;
  }
  KahanSum s;
  for (double t : terms) s.add(std::pow(t, r));
  return std::pow(s.value(), 1.0 / r);
}

inline std::vector<std::string> nakai_warnings(const SpaceParams& p) {
  std::vector<std::string> w;
  if (p.variant == Variant::E && !std::isinf(p.r)) {
    try {
      if (!check_nakai(p.phi, scales_for(p.phi)).ok) w.push_back("nakai condition not verified for phi");
    } catch (const domain_error& e) {
      w.push_back(std::string("nakai condition not checked: ") + e.what());
    }
  }
  return w;
}
}  // namespace detail

/// Band levels used by the function-space norm at resolution J.
inline std::pair<int, int> band_range(const SpaceParams& p, int J) {
  return {p.homogeneous ? p.min_level() : 0, FilterBank::top_level(J)};
}

/// N/E norm of f. Inhomogeneous: theta band plus the l^r aggregate over j>=1;
/// homogeneous: tau_j for all j in the floored range, no theta.
inline NormResult space_norm(const GridFunction& f, const SpaceParams& p, const FilterBank& bank) {
  if (f.n != p.n) throw domain_error("space_norm: dimension mismatch");
  NormResult res;
  res.warnings = detail::nakai_warnings(p);
  BandSet bs(f, bank);
  auto [lo, hi] = band_range(p, f.J);
  const int ml = p.min_level();
  double low = 0.0;
  int first = lo;
  if (!p.homogeneous) {
    low = morrey_norm(bs.band(0), p.q, p.phi, ml);
    first = 1;
  }
  if (p.variant == Variant::N) {
    std::vector<double> terms;
    for (int j = first; j <= hi; ++j)
      terms.push_back(std::exp2(j * p.s) * morrey_norm(bs.band(j, p.homogeneous), p.q, p.phi, ml));
    res.value = low + detail::lr_combine(terms, p.r);
    return res;
  }
  std::vector<double> agg(f.size(), 0.0);
  for (int j = first; j <= hi; ++j) {
    auto b = bs.band(j, p.homogeneous);
    double w = std::exp2(j * p.s);
    for (std::size_t i = 0; i < agg.size(); ++i) {
      double v = w * std::abs(b.data[i]);
      agg[i] = std::isinf(p.r) ? std::max(agg[i], v) : agg[i] + std::pow(v, p.r);
    }
  }
  if (!std::isinf(p.r))
    for (auto& v : agg) v = std::pow(v, 1.0 / p.r);
  res.value = low + morrey_norm_real(agg, f.n, f.J, p.q, p.phi, ml);
  return res;
}

/// Finitely supported lambda_{jm}: one dense array per level; levels j <= 0
/// hold a single coefficient (the cube covers the torus).
struct CoeffField {
  int n = 1;
  int jmin = 0, jmax = -1;
  std::vector<std::vector<cplx>> lv;

  CoeffField() = default;
  CoeffField(int dim, int lo, int hi) : n(dim), jmin(lo), jmax(hi) {
    if (hi < lo) throw domain_error("CoeffField: empty level range");
    for (int j = lo; j <= hi; ++j) lv.emplace_back(cubes_at(j), cplx(0.0));
  }

  std::size_t cubes_at(int j) const { return j <= 0 ? 1 : std::size_t(1) << (j * n); }
  int levels() const { return jmax - jmin + 1; }
  bool has(int j) const { return j >= jmin && j <= jmax; }
  std::vector<cplx>& level(int j) { return lv.at(j - jmin); }
  const std::vector<cplx>& level(int j) const { return lv.at(j - jmin); }
  cplx& at(int j, std::size_t flat) { return level(j).at(flat); }
  cplx at(int j, std::size_t flat) const { return level(j).at(flat); }
  cplx& at(const DyadicCube& q) { return at(q.j, q.j <= 0 ? 0 : flat_index(q.m, q.j)); }
  cplx at(const DyadicCube& q) const { return at(q.j, q.j <= 0 ? 0 : flat_index(q.m, q.j)); }

  CoeffField& operator*=(cplx c) {
    for (auto& l : lv)
      for (auto& v : l) v *= c;
    return *this;
  }
  friend CoeffField operator*(cplx c, CoeffField a) { return a *= c; }
  bool operator==(const CoeffField& o) const { return n == o.n && jmin == o.jmin && jmax == o.jmax && lv == o.lv; }
  bool is_zero() const {
    for (auto& l : lv)
      for (auto& v : l)
        if (v != 0.0) return false;
    return true;
  }
  std::size_t nonzeros() const {
    std::size_t k = 0;
    for (auto& l : lv)
      for (auto& v : l) k += v != 0.0;
    return k;
  }
};

namespace detail {
// |lambda_{j, m(c)}| for every cell c of level B >= j (levels <= 0 are constant).
inline std::vector<double> level_on_cells(const CoeffField& lam, int j, int B) {
  const int n = lam.n;
  std::size_t total = std::size_t(1) << (B * n);
  std::vector<double> out(total);
  const auto& l = lam.level(j);
  if (j <= 0) {
    std::fill(out.begin(), out.end(), std::abs(l[0]));
    return out;
  }
  const std::size_t side = std::size_t(1) << B;
  const int shift = B - j;
  for (std::size_t f = 0; f < total; ++f) {
    std::size_t t = f, g = 0, mul = 1;
    for (int k = n - 1; k >= 0; --k) {
      g += ((t % side) >> shift) * mul;
      mul <<= j;
      t /= side;
    }
    out[f] = std::abs(l[g]);
  }
  return out;
}
}  // namespace detail

/// Morrey norm of sum_m |lambda_{jm}| chi_{Q_jm} for one level, with cubes
/// down to level `depth`. Indicator sums are piecewise constant, so the
/// averages are exact cell counts times values.
inline double level_morrey(const CoeffField& lam, int j, double q, const GrowthFunction& phi, int min_level,
                           int depth) {
  int B = std::max(j, 0);
  auto cells = detail::level_on_cells(lam, j, B);
  for (auto& v : cells) v = std::pow(v, q);
  return morrey_pyramid(std::move(cells), lam.n, B, q, phi, min_level, std::max(depth - B, 0)).value;
}

/// Sequence-space quasi-norm n (variant N) or e (variant E).
inline NormResult seq_norm(const CoeffField& lam, const SpaceParams& p) {
  if (lam.n != p.n) throw domain_error("seq_norm: dimension mismatch");
  if (!p.homogeneous && lam.jmin < 0) throw domain_error("seq_norm: negative levels need homogeneous mode");
  NormResult res;
  res.warnings = detail::nakai_warnings(p);
  const int ml = std::min(p.min_level(), lam.jmin);
  const int depth = std::max(lam.jmax, 0);
  if (p.variant == Variant::N) {
    std::vector<double> terms;
    for (int j = lam.jmin; j <= lam.jmax; ++j)
      terms.push_back(std::exp2(j * p.s) * level_morrey(lam, j, p.q, p.phi, ml, depth));
    res.value = detail::lr_combine(terms, p.r);
    return res;
  }
  const int B = depth;
  std::vector<double> agg(std::size_t(1) << (B * lam.n), 0.0);
  for (int j = lam.jmin; j <= lam.jmax; ++j) {
    auto cells = detail::level_on_cells(lam, j, B);
    double w = std::exp2(j * p.s);
    for (std::size_t i = 0; i < agg.size(); ++i) {
      double v = w * cells[i];
      agg[i] = std::isinf(p.r) ? std::max(agg[i], v) : agg[i] + std::pow(v, p.r);
    }
  }
  for (auto& v : agg) v = std::isinf(p.r) ? std::pow(v, p.q) : std::pow(v, p.q / p.r);
  res.value = morrey_pyramid(std::move(agg), lam.n, B, p.q, p.phi, ml).value;
  return res;
}

/// lambda^beta_{nu m}: one coefficient field per multi-index beta.
struct QuarkCoeffs {
  int n = 1;
  int beta_cutoff = 0;
  double rho = 1.0;
  std::map<std::vector<int>, CoeffField> values;

  bool is_zero() const {
    for (auto& [b, f] : values)
      if (!f.is_zero()) return false;
    return true;
  }
};

/// sup_beta 2^{rho |beta|} ||lambda^beta||.
inline double quark_norm(const QuarkCoeffs& ql, const SpaceParams& p, double rho) {
  double best = 0;
  for (auto& [beta, field] : ql.values) {
    if (abs_multi(beta) > ql.beta_cutoff) throw domain_error("quark_norm: beta above cutoff");
    best = std::max(best, std::exp2(rho * abs_multi(beta)) * seq_norm(field, p).value);
  }
  return best;
}

enum class NormKind { Morrey, Space, Sequence };

struct TrianglePair {
  double lhs = 0, rhs = 0;
  double w = 1;
  bool holds(double tol = 1e-9) const { return lhs <= rhs * (1 + tol) + 1e-300; }
};

/// (||f+g||^w, ||f||^w + ||g||^w), w = min(1,q) for Morrey norms and
/// min(1,q,r) otherwise.
inline TrianglePair min_triangle_check(const GridFunction& f, const GridFunction& g, NormKind kind,
                                       const SpaceParams& p, const FilterBank& bank = default_bank()) {
  if (!f.same_grid(g)) throw domain_error("min_triangle_check: grids differ");
  TrianglePair t;
  auto norm = [&](const GridFunction& x) {
    if (kind == NormKind::Morrey) return morrey_norm(x, p.q, p.phi, p.min_level());
    return space_norm(x, p, bank).value;
  };
  t.w = kind == NormKind::Morrey ? std::min(1.0, p.q) : p.triangle_exponent();
  t.lhs = std::pow(norm(f + g), t.w);
  t.rhs = std::pow(norm(f), t.w) + std::pow(norm(g), t.w);
  return t;
}

inline TrianglePair min_triangle_check(const CoeffField& a, const CoeffField& b, const SpaceParams& p) {
  if (a.n != b.n || a.jmin != b.jmin || a.jmax != b.jmax) throw domain_error("min_triangle_check: fields differ");
  CoeffField c = a;
  for (int j = a.jmin; j <= a.jmax; ++j)
    for (std::size_t i = 0; i < c.level(j).size(); ++i) c.at(j, i) += b.at(j, i);
  TrianglePair t;
  t.w = p.triangle_exponent();
  t.lhs = std::pow(seq_norm(c, p).value, t.w);
  t.rhs = std::pow(seq_norm(a, p).value, t.w) + std::pow(seq_norm(b, p).value, t.w);
  return t;
}

}  // namespace morreykit
