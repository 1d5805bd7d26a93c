#pragma once

#include <set>

#include "atoms.hpp"

namespace morreykit {

/// Parameters of the trace map from dimension n to n-1 together with the
/// derived target parameters (s* = s - 1/q, phi*(t) = phi(t) t^{-1/q}).
struct TraceProblem {
  SpaceParams params;
  SpaceParams star;
  int depth = 6;
  std::uint64_t seed = 0;
};

struct TraceValidation {
  bool s_ok = false;
  bool phi_in_class = false;
  bool star_increasing = false;
  bool summable = false;
  double s_threshold = 0;
  double summability_C = kInf;
  std::vector<std::string> messages;
  bool ok() const { return s_ok && phi_in_class && star_increasing && summable; }
};

/// s must exceed 1/q + (n-1)(1/min(1,q) - 1) for N, with min(1,q,r) for E.
inline double trace_s_threshold(const SpaceParams& p) {
  double w = p.variant == Variant::N ? std::min(1.0, p.q) : std::min({1.0, p.q, p.r});
  return 1.0 / p.q + (p.n - 1) * (1.0 / w - 1.0);
}

inline TraceValidation validate_trace(const SpaceParams& p, int scale_depth = 10) {
  TraceValidation v;
  if (p.n < 2) {
    v.messages.push_back("dimension must be at least 2");
    return v;
  }
  v.s_threshold = trace_s_threshold(p);
  v.s_ok = p.s > v.s_threshold;
  if (!v.s_ok)
    v.messages.push_back("s = " + fmt_double(p.s) + " does not exceed " + fmt_double(v.s_threshold));
  auto scales = scales_for(p.phi, scale_depth);
  v.phi_in_class = is_in_Gq(p.phi, p.q, scales);
  if (!v.phi_in_class) v.messages.push_back("phi is not in the class G_q");
  auto star = trace_transform(p);
  auto sum = check_trace_summability(star.phi, scale_depth);
  v.star_increasing = true;
  for (int k = 1; k <= scale_depth; ++k)
    if (!(star.phi(std::ldexp(1.0, -k + 1)) > star.phi(std::ldexp(1.0, -k)))) v.star_increasing = false;
  if (!v.star_increasing) v.messages.push_back("phi* = phi(t) t^{-1/q} is not increasing");
  v.summable = sum.ok;
  v.summability_C = sum.C;
  if (!sum.ok) v.messages.push_back("sum_j 1/phi*(2^j s) is not bounded by C/phi*(s)");
  return v;
}

/// Builds a validated problem; throws precondition_error listing every failed check.
inline TraceProblem make_trace_problem(const SpaceParams& p, int depth, std::uint64_t seed = 0) {
  auto v = validate_trace(p);
  if (!v.ok()) {
    std::string msg = "trace problem rejected:";
    for (auto& m : v.messages) msg += " " + m + ";";
    throw precondition_error(msg);
  }
  TraceProblem tp;
  tp.params = p;
  tp.star = trace_transform(p);
  tp.depth = depth;
  tp.seed = seed;
  return tp;
}

namespace detail {
inline std::size_t slab_flat(std::size_t mprime, int j, std::int64_t mn) {
  if (j <= 0) return 0;
  return (mprime << j) + std::size_t(wrap_index(mn, j));
}
}  // namespace detail

/// lambda' = slice m_n = 0 and lambda-dagger = slice m_n = -1 (that is 2^j - 1).
/// At levels j <= 0 there is one cube and the two slices coincide.
inline std::pair<CoeffField, CoeffField> trace_coeff(const CoeffField& lam) {
  if (lam.n < 2) throw domain_error("trace_coeff: dimension must be at least 2");
  CoeffField a(lam.n - 1, lam.jmin, lam.jmax), b(lam.n - 1, lam.jmin, lam.jmax);
  for (int j = lam.jmin; j <= lam.jmax; ++j)
    for (std::size_t mp = 0; mp < a.cubes_at(j); ++mp) {
      a.at(j, mp) = lam.at(j, detail::slab_flat(mp, j, 0));
      b.at(j, mp) = lam.at(j, detail::slab_flat(mp, j, -1));
    }
  return {a, b};
}

/// Plants lambda' on the m_n = 0 slab.
inline CoeffField extend_coeff(const CoeffField& lp) {
  CoeffField out(lp.n + 1, lp.jmin, lp.jmax);
  for (int j = lp.jmin; j <= lp.jmax; ++j)
    for (std::size_t mp = 0; mp < lp.cubes_at(j); ++mp) out.at(j, detail::slab_flat(mp, j, 0)) = lp.at(j, mp);
  return out;
}

struct TraceBound {
  double value = 0;   ///< lhs / rhs, or 0 when the denominator vanishes
  double lhs = 0, rhs = 0;
  bool zero_denominator = false;
  DyadicCube witness;  ///< cube attaining the sup (E variant)
};

namespace detail {

inline TraceBound finish_bound(double lhs, double rhs, DyadicCube w = {}) {
  TraceBound b;
  b.lhs = lhs;
  b.rhs = rhs;
  b.witness = std::move(w);
  if (rhs == 0) {
    b.zero_denominator = true;
    b.value = 0;
  } else {
    b.value = lhs / rhs;
  }
  return b;
}

// Mean over the 2^d children of every cube at level j (cur holds level j+1).
inline std::vector<double> child_mean(const std::vector<double>& cur, int d, int j) {
  if (j < 0) return cur;
  const std::size_t side = std::size_t(1) << j, cside = side << 1;
  std::vector<double> next(std::size_t(1) << (j * d), 0.0);
  std::vector<std::size_t> c(d);
  for (std::size_t f = 0; f < next.size(); ++f) {
    std::size_t t = f;
    for (int k = d - 1; k >= 0; --k) c[k] = t % side, t /= side;
    double s = 0;
    for (std::size_t ch = 0; ch < (std::size_t(1) << d); ++ch) {
      std::size_t flat = 0;
      for (int k = 0; k < d; ++k) flat = flat * cside + 2 * c[k] + ((ch >> (d - 1 - k)) & 1);
      s += cur[flat];
    }
    next[f] = s / double(std::size_t(1) << d);
  }
  return next;
}

// Parent index at level j-1 of cube f at level j (d dims).
inline std::size_t parent_flat(std::size_t f, int d, int j) {
  if (j <= 1) return 0;
  const std::size_t side = std::size_t(1) << j;
  std::size_t out = 0, mul = 1;
  for (int k = d - 1; k >= 0; --k) {
    out += ((f % side) >> 1) * mul;
    mul <<= (j - 1);
    f /= side;
  }
  return out;
}

struct HalfSums {
  // per Q' level k (index k - kmin), per cube: the high and low sums
  int kmin = 0, kmax = 0;
  std::vector<std::vector<double>> hi, lo;
};

// hi(Q') = sum_{j >= k} 2^{j s* q} avg_{Q'} |lambda'_j|^q,
// lo(Q') = sum_{j <= k} 2^{j s* q} |lambda'_{j, ancestor of Q'}|^q.
inline HalfSums half_sums(const CoeffField& lp, double sstar, double q, int kmin) {
  const int d = lp.n;
  HalfSums h;
  h.kmin = kmin;
  h.kmax = std::max(lp.jmax, 0);
  const int L = h.kmax - kmin + 1;
  h.hi.resize(L);
  h.lo.resize(L);
  auto term = [&](int j, std::size_t f) {
    if (!lp.has(j)) return 0.0;
    return std::exp2(j * sstar * q) * std::pow(std::abs(lp.at(j, f)), q);
  };
  auto cnt = [&](int k) { return k <= 0 ? std::size_t(1) : std::size_t(1) << (k * d); };
  for (int k = h.kmax; k >= kmin; --k) {
    auto& cur = h.hi[k - kmin];
    if (k == h.kmax) {
      cur.assign(cnt(k), 0.0);
    } else {
      cur = child_mean(h.hi[k + 1 - kmin], d, k);
    }
    for (std::size_t f = 0; f < cur.size(); ++f) cur[f] += term(k, f);
  }
  for (int k = kmin; k <= h.kmax; ++k) {
    auto& cur = h.lo[k - kmin];
    cur.assign(cnt(k), 0.0);
    for (std::size_t f = 0; f < cur.size(); ++f) {
      double prev = k == kmin ? 0.0 : h.lo[k - 1 - kmin][parent_flat(f, d, k)];
      cur[f] = prev + term(k, f);
    }
  }
  return h;
}

inline int trace_kmin(const TraceProblem& tp, const CoeffField& lp) {
  return tp.params.homogeneous ? std::min(tp.params.min_level(), lp.jmin) : 0;
}

// sup over Q' of phi*(l(Q')) * sums^{1/q}
inline std::pair<double, DyadicCube> sup_half(const std::vector<std::vector<double>>& sums, int kmin, int d,
                                              const GrowthFunction& phistar, double q) {
  double best = 0;
  DyadicCube w{kmin, Index(d, 0)};
  for (std::size_t i = 0; i < sums.size(); ++i) {
    int k = kmin + int(i);
    double wt = phistar(std::ldexp(1.0, -k));
    for (std::size_t f = 0; f < sums[i].size(); ++f) {
      double v = wt * std::pow(sums[i][f], 1.0 / q);
      if (v > best) {
        best = v;
        CubeLattice lat{d, std::max(k, 0), 0, true};
        w = lat.cube(std::max(k, 0), std::int64_t(f));
        w.j = k;
      }
    }
  }
  return {best, w};
}

// N variant, level-wise: for each j, sup over Q' coarser (hi) or finer (lo)
// than level j of phi*(l) (avg_{Q'} |lambda'_j|^q)^{1/q}.
inline double n_variant_half(const CoeffField& lp, const TraceProblem& tp, bool high) {
  const int d = lp.n, kmin = trace_kmin(tp, lp), depth = std::max(lp.jmax, 0);
  const double q = tp.star.q;
  std::vector<double> terms;
  for (int j = lp.jmin; j <= lp.jmax; ++j) {
    double sup = 0;
    if (high) {
      const int B = std::max(j, 0);
      auto cells = level_on_cells(lp, j, B);
      for (auto& v : cells) v = std::pow(v, q);
      sup = morrey_pyramid(std::move(cells), d, B, q, tp.star.phi, kmin).value;
    } else {
      double m = 0;
      for (auto& v : lp.level(j)) m = std::max(m, std::abs(v));
      double w = 0;
      for (int k = j; k <= depth; ++k) w = std::max(w, tp.star.phi(std::ldexp(1.0, -k)));
      sup = w * m;
    }
    terms.push_back(std::exp2(j * tp.star.s) * sup);
  }
  return lr_combine(terms, tp.star.r);
}

}  // namespace detail

/// Numerator of the high-frequency half (levels j >= j_{Q'}), sup over Q'.
/// E variant: sup_{Q'} phi*(l') (|Q'|^-1 int_{Q'} sum_{j>=j_Q'} |2^{js*} sum lambda' chi|^q)^{1/q}.
inline std::pair<double, DyadicCube> trace_lhs_I(const CoeffField& lp, const TraceProblem& tp) {
  if (tp.params.variant == Variant::N) return {detail::n_variant_half(lp, tp, true), DyadicCube{}};
  int kmin = detail::trace_kmin(tp, lp);
  auto h = detail::half_sums(lp, tp.star.s, tp.star.q, kmin);
  return detail::sup_half(h.hi, kmin, lp.n, tp.star.phi, tp.star.q);
}

/// Numerator of the low-frequency half (levels j <= j_{Q'}), through the
/// ancestor cubes of Q'.
inline std::pair<double, DyadicCube> trace_lhs_II(const CoeffField& lp, const TraceProblem& tp) {
  if (tp.params.variant == Variant::N) return {detail::n_variant_half(lp, tp, false), DyadicCube{}};
  int kmin = detail::trace_kmin(tp, lp);
  auto h = detail::half_sums(lp, tp.star.s, tp.star.q, kmin);
  return detail::sup_half(h.lo, kmin, lp.n, tp.star.phi, tp.star.q);
}

/// Empirical constant of the high-frequency half: lhs_I(lambda') / ||lambda||.
inline TraceBound trace_bound_I(const CoeffField& lam, const TraceProblem& tp) {
  auto lp = trace_coeff(lam).first;
  auto [lhs, w] = trace_lhs_I(lp, tp);
  return detail::finish_bound(lhs, seq_norm(lam, tp.params).value, w);
}

inline TraceBound trace_bound_II(const CoeffField& lam, const TraceProblem& tp) {
  auto lp = trace_coeff(lam).first;
  auto [lhs, w] = trace_lhs_II(lp, tp);
  return detail::finish_bound(lhs, seq_norm(lam, tp.params).value, w);
}

struct ExtensionBound {
  TraceBound total;     ///< ||extend(lambda')|| / ||lambda'||*
  double G_part = 0;    ///< same sup restricted to cubes G(Q') touching the hyperplane
  double nonG_part = 0; ///< cubes Q' x [k l, (k+1) l), k >= 1
};

namespace detail {

// Morrey sup of a cell field at base level B split by cube class: a cube at
// level i >= 0 is G-shaped when its last index is 0. Fine levels (finer than
// B) inherit the cell values. Levels <= 0 are the whole torus, counted as G.
inline std::pair<double, double> split_morrey(std::vector<double> a, int n, int B, double q,
                                              const GrowthFunction& phi, int min_level, int fine) {
  double g = 0, ng = 0;
  auto consider = [&](int j, const std::vector<double>& lvl, bool fine_level) {
    const double w = phi(std::ldexp(1.0, -j));
    const std::size_t side = j <= 0 ? 1 : std::size_t(1) << j;
    for (std::size_t f = 0; f < lvl.size(); ++f) {
      double v = w * std::pow(std::max(lvl[f], 0.0), 1.0 / q);
      bool onG = j <= 0 || f % side == 0;
      if (onG) g = std::max(g, v);
      // every base cell contains finer cubes off the hyperplane
      if (!onG || fine_level) ng = std::max(ng, v);
    }
  };
  for (int i = B + fine; i > B; --i) consider(i, a, true);
  consider(B, a, false);
  std::vector<double> cur = std::move(a);
  for (int j = B - 1; j >= 0; --j) {
    cur = child_mean(cur, n, j);
    if (j >= min_level) consider(j, cur, false);
  }
  for (int j = -1; j >= min_level; --j) consider(j, cur, false);
  return {g, ng};
}

}  // namespace detail

/// ||extend(lambda')||_{params} / ||lambda'||_{star}, with the numerator's
/// sup also reported separately over G-shaped and other cubes.
inline ExtensionBound extension_bound(const CoeffField& lp, const TraceProblem& tp) {
  ExtensionBound eb;
  auto lam = extend_coeff(lp);
  const auto& p = tp.params;
  double num = seq_norm(lam, p).value;
  double den = seq_norm(lp, tp.star).value;
  eb.total = detail::finish_bound(num, den);
  const int ml = std::min(p.min_level(), lam.jmin);
  const int depth = std::max(lam.jmax, 0);
  if (p.variant == Variant::E) {
    std::vector<double> agg(std::size_t(1) << (depth * lam.n), 0.0);
    for (int j = lam.jmin; j <= lam.jmax; ++j) {
      auto cells = detail::level_on_cells(lam, j, depth);
      double w = std::exp2(j * p.s);
      for (std::size_t i = 0; i < agg.size(); ++i) {
        double v = w * cells[i];
        agg[i] = std::isinf(p.r) ? std::max(agg[i], v) : agg[i] + std::pow(v, p.r);
      }
    }
    for (auto& v : agg) v = std::isinf(p.r) ? std::pow(v, p.q) : std::pow(v, p.q / p.r);
    auto [g, ng] = detail::split_morrey(std::move(agg), lam.n, depth, p.q, p.phi, ml, 0);
    eb.G_part = g;
    eb.nonG_part = ng;
  } else {
    std::vector<double> tg, tn;
    for (int j = lam.jmin; j <= lam.jmax; ++j) {
      int B = std::max(j, 0);
      auto cells = detail::level_on_cells(lam, j, B);
      for (auto& v : cells) v = std::pow(v, p.q);
      auto [g, ng] = detail::split_morrey(std::move(cells), lam.n, B, p.q, p.phi, ml, std::max(depth - B, 0));
      tg.push_back(std::exp2(j * p.s) * g);
      tn.push_back(std::exp2(j * p.s) * ng);
    }
    eb.G_part = detail::lr_combine(tg, p.r);
    eb.nonG_part = detail::lr_combine(tn, p.r);
  }
  if (den > 0) {
    eb.G_part /= den;
    eb.nonG_part /= den;
  } else {
    eb.G_part = eb.nonG_part = 0;
  }
  return eb;
}

struct TraceFunctionResult {
  GridFunction trace;        ///< sum lambda_jm a_jm(., 0)
  GridFunction restriction;  ///< f(., 0) read off the grid
  double max_diff = 0;
  std::set<std::int64_t> slabs;  ///< last indices m_n (j >= 2) whose atoms reach x_n = 0
};

/// Trace through the atomic decomposition: analyze f, restrict every atom to
/// the hyperplane x_n = 0, and sum the restrictions in dimension n-1.
inline TraceFunctionResult trace_function(const GridFunction& f, const RychkovPair& pair, int K = 1, int jobs = 1) {
  if (f.n < 2) throw domain_error("trace_function: dimension must be at least 2");
  auto dec = atomic_analyze(f, pair, K, jobs);
  const int n = f.n, J = f.J, G = f.G();
  TraceFunctionResult res;
  res.trace = GridFunction(n - 1, J);
  res.restriction = GridFunction(n - 1, J);
  for (std::size_t i = 0; i < res.restriction.size(); ++i) res.restriction.data[i] = f.data[i * G];
  std::vector<int> loc(n);
  for (auto& [Q, p] : dec.atoms) {
    const cplx lam = dec.lambda.at(Q);
    // row of the patch lying on x_n = 0, if any
    int row = ((0 - p.origin[n - 1]) % G + G) % G;
    if (row >= p.width) continue;
    bool touched = false;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      std::size_t t = i;
      for (int k = n - 1; k >= 0; --k) loc[k] = int(t % p.width), t /= p.width;
      if (loc[n - 1] != row || p.data[i] == 0.0) continue;
      std::size_t flat = 0;
      for (int k = 0; k < n - 1; ++k) flat = flat * G + ((p.origin[k] + loc[k]) % G + G) % G;
      res.trace.data[flat] += lam * p.data[i];
      touched = true;
    }
    if (touched && Q.j >= 2) res.slabs.insert(Q.m[n - 1] == (std::int64_t(1) << Q.j) - 1 ? -1 : Q.m[n - 1]);
  }
  res.max_diff = (res.trace - res.restriction).max_abs();
  return res;
}

}  // namespace morreykit
