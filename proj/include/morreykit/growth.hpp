#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "util.hpp"

namespace morreykit {

enum class Family { Power, PowerLog, LogInv, Table };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Power: return "power";
    case Family::PowerLog: return "powerlog";
    case Family::LogInv: return "loginv";
    case Family::Table: return "table";
  }
  return "?";
}

/// Growth function phi on (0, inf).
///
/// The value is base(t)^power * t^shift, where base is one of
///   power:    t^(n/p)
///   powerlog: t^(n/p) * log(3+t)^(-exponent)
///   loginv:   log(2+1/t)^(-exponent)
///   table:    tabulated values at t = 2^j, log-log interpolated in between.
/// The power/shift pair keeps the family closed under phi^u and phi*t^a.
class GrowthFunction {
 public:
  GrowthFunction() = default;

  static GrowthFunction power(double p, int n) {
    if (!(p > 0)) throw domain_error("power: p must be positive");
    GrowthFunction g;
    g.family_ = Family::Power;
    g.p_ = p;
    g.n_ = n;
    g.alpha_ = std::isinf(p) ? 0.0 : n / p;
    return g;
  }

  static GrowthFunction power_log(double p, double exponent, int n) {
    GrowthFunction g = power(p, n);
    g.family_ = Family::PowerLog;
    g.exponent_ = exponent;
    return g;
  }

  static GrowthFunction log_inv(double exponent, int n) {
    GrowthFunction g;
    g.family_ = Family::LogInv;
    g.exponent_ = exponent;
    g.n_ = n;
    return g;
  }

  static GrowthFunction table(std::map<int, double> entries, int n) {
    if (entries.empty()) throw domain_error("table: no entries");
    for (auto& [j, v] : entries)
      if (!(v > 0)) throw domain_error("table: values must be positive");
    GrowthFunction g;
    g.family_ = Family::Table;
    g.table_ = std::move(entries);
    g.n_ = n;
    return g;
  }

  static GrowthFunction constant(int n) { return power(kInf, n); }

  Family family() const { return family_; }
  int dim() const { return n_; }
  double p() const { return p_; }
  double exponent() const { return exponent_; }
  double shift() const { return shift_; }
  double power_u() const { return power_; }
  const std::map<int, double>& entries() const { return table_; }

  double operator()(double t) const {
    if (!(t > 0)) throw domain_error("growth function evaluated at non-positive scale");
    double v = std::pow(base(t), power_);
    if (shift_ != 0.0) v *= std::pow(t, shift_);
    return v;
  }

  /// t -> phi(t)^u
  GrowthFunction raised(double u) const {
    GrowthFunction g = *this;
    g.power_ *= u;
    g.shift_ *= u;
    return g;
  }

  /// t -> phi(t) * t^a
  GrowthFunction times_power(double a) const {
    GrowthFunction g = *this;
    g.shift_ += a;
    return g;
  }

  GrowthFunction with_dim(int n) const {
    GrowthFunction g = *this;
    g.n_ = n;
    return g;
  }

 private:
  double base(double t) const {
    switch (family_) {
      case Family::Power: return std::pow(t, alpha_);
      case Family::PowerLog: return std::pow(t, alpha_) * std::pow(std::log(3.0 + t), -exponent_);
      case Family::LogInv: return std::pow(std::log(2.0 + 1.0 / t), -exponent_);
      case Family::Table: return table_value(t);
    }
    return 0.0;
  }

  double table_value(double t) const {
    double lt = std::log2(t);
    double rj = std::round(lt);
    if (std::abs(lt - rj) < 1e-12) {
      auto it = table_.find(static_cast<int>(rj));
      if (it != table_.end()) return it->second;
    }
    auto hi = table_.lower_bound(static_cast<int>(std::ceil(lt)));
    if (hi == table_.end() || hi == table_.begin() || table_.begin()->first > lt)
      throw domain_error("table growth function does not cover scale 2^" + fmt_double(lt));
    auto lo = std::prev(hi);
    double w = (lt - lo->first) / double(hi->first - lo->first);
    return std::exp2((1 - w) * std::log2(lo->second) + w * std::log2(hi->second));
  }

  Family family_ = Family::Power;
  int n_ = 1;
  double p_ = 1.0;
  double alpha_ = 1.0;
  double exponent_ = 0.0;
  double power_ = 1.0;
  double shift_ = 0.0;
  std::map<int, double> table_;
};

/// Dyadic scales 2^jmin, ..., 2^jmax.
inline std::vector<double> dyadic_scales(int jmin, int jmax) {
  std::vector<double> s;
  for (int j = jmin; j <= jmax; ++j) s.push_back(std::ldexp(1.0, j));
  return s;
}

inline void check_scales(const std::vector<double>& scales) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0)) throw domain_error("non-positive scale");
    if (i && !(scales[i] > scales[i - 1])) throw domain_error("scales must be strictly ascending");
  }
}

inline bool is_in_Gq(const GrowthFunction& phi, double q, const std::vector<double>& scales) {
  check_scales(scales);
  const double tol = 1e-12;
  const double a = phi.dim() / q;
  for (std::size_t i = 1; i < scales.size(); ++i) {
    double t0 = scales[i - 1], t1 = scales[i];
    double f0 = phi(t0), f1 = phi(t1);
    if (f1 < f0 * (1 - tol)) return false;
    double g0 = f0 * std::pow(t0, -a), g1 = f1 * std::pow(t1, -a);
    if (g1 > g0 * (1 + tol)) return false;
  }
  return true;
}

struct NakaiResult {
  bool ok = false;
  double epsilon = 0.0;
  double C = kInf;
};

namespace detail {
// sup over t >= r of t^eps phi(r) / (r^eps phi(t)) on scales[lo..hi]
inline double nakai_sup(const std::vector<double>& s, const std::vector<double>& v, double eps,
                        std::size_t lo, std::size_t hi) {
  double c = 0.0;
  for (std::size_t i = lo; i <= hi; ++i)
    for (std::size_t k = i; k <= hi; ++k)
      c = std::max(c, std::pow(s[k] / s[i], eps) * v[i] / v[k]);
  return c;
}

// A nondecreasing sequence of partial values is judged convergent when its
// increments vanish or shrink geometrically over the last three steps.
inline bool increments_converge(const std::vector<double>& partial) {
  std::size_t m = partial.size();
  if (m < 4) return true;
  double last = partial[m - 1];
  std::vector<double> d;
  for (std::size_t i = m - 3; i < m; ++i) d.push_back(partial[i] - partial[i - 1]);
  if (d.back() <= 1e-12 * std::abs(last)) return true;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (!(d[i - 1] > 0) || d[i] / d[i - 1] > 0.98) return false;
  return true;
}
}  // namespace detail

/// Searches eps = 1, 1/2, ..., 2^-10 for which the sup of
/// t^eps phi(r) / (r^eps phi(t)) over t >= r is finite. Finiteness on a finite
/// grid is read as: trimming the outermost scale on each side does not lower
/// the sup.
inline NakaiResult check_nakai(const GrowthFunction& phi, const std::vector<double>& scales) {
  if (scales.empty()) throw domain_error("check_nakai: empty scale grid");
  check_scales(scales);
  if (scales.size() < 8) throw domain_error("check_nakai: need at least 8 scales");
  std::vector<double> v(scales.size());
  for (std::size_t i = 0; i < scales.size(); ++i) v[i] = phi(scales[i]);
  const std::size_t last = scales.size() - 1;
  for (int k = 0; k <= 10; ++k) {
    double eps = std::ldexp(1.0, -k);
    double full = detail::nakai_sup(scales, v, eps, 0, last);
    double inner = detail::nakai_sup(scales, v, eps, 1, last - 1);
    if (full <= inner * (1 + 1e-9)) return {true, eps, full};
  }
  return {false, 0.0, kInf};
}

/// Integral form of the Nakai condition: sup_r phi(r) * int_r^inf ds/(phi(s) s),
/// integral replaced by its dyadic Riemann sum ln2 * sum_k 1/phi(2^k r).
inline NakaiResult check_nakai_integral(const GrowthFunction& phi, const std::vector<double>& scales) {
  check_scales(scales);
  std::vector<double> partial;
  double best = 0;
  for (std::size_t depth = 1; depth <= scales.size(); ++depth) {
    double c = 0;
    for (std::size_t i = 0; i < depth; ++i) {
      double sum = 0;
      for (std::size_t k = i; k < depth; ++k) sum += std::log(2.0) / phi(scales[k]);
      c = std::max(c, phi(scales[i]) * sum);
    }
    partial.push_back(c);
    best = c;
  }
  return {detail::increments_converge(partial), 0.0, best};
}

/// phi*(t) = sup_{s >= t} (t/s)^(n/q) phi(s) over dyadic scales.
inline GrowthFunction normalize_star(const GrowthFunction& phi, double q, const std::vector<double>& scales) {
  check_scales(scales);
  const double a = phi.dim() / q;
  std::map<int, double> out;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    double lj = std::log2(scales[i]);
    if (std::abs(lj - std::round(lj)) > 1e-12) throw domain_error("normalize_star: scales must be dyadic");
    double best = 0;
    for (std::size_t k = i; k < scales.size(); ++k)
      best = std::max(best, std::pow(scales[i] / scales[k], a) * phi(scales[k]));
    out[static_cast<int>(std::lround(lj))] = best;
  }
  return GrowthFunction::table(std::move(out), phi.dim());
}

/// Scale grid 2^-depth..2^depth, clipped to the coverage of a table.
inline std::vector<double> scales_for(const GrowthFunction& phi, int depth = 10) {
  int lo = -depth, hi = depth;
  if (phi.family() == Family::Table) {
    lo = std::max(lo, phi.entries().begin()->first);
    hi = std::min(hi, phi.entries().rbegin()->first);
  }
  return dyadic_scales(lo, hi);
}

enum class Variant { N, E };

inline const char* variant_name(Variant v) { return v == Variant::N ? "N" : "E"; }

struct SpaceParams {
  double q = 2.0;
  double r = 2.0;  ///< kInf for the sup case
  double s = 0.0;
  GrowthFunction phi = GrowthFunction::power(2.0, 1);
  Variant variant = Variant::E;
  bool homogeneous = false;
  int n = 1;
  int hom_floor = -4;  ///< lowest level used in homogeneous mode

  double sigma_q() const { return n * std::max(1.0 / q - 1.0, 0.0); }
  double sigma_r() const { return std::isinf(r) ? 0.0 : n * std::max(1.0 / r - 1.0, 0.0); }
  double sigma_qr() const { return std::max(sigma_q(), sigma_r()); }
  /// Exponent of the quasi-triangle inequality for the function-space norm.
  double triangle_exponent() const { return std::min({1.0, q, r}); }
  int min_level() const { return homogeneous ? hom_floor : 0; }
};

inline SpaceParams trace_transform(const SpaceParams& p) {
  if (p.n < 2) throw domain_error("trace_transform: dimension must be at least 2");
  SpaceParams t = p;
  t.n = p.n - 1;
  t.s = p.s - 1.0 / p.q;
  t.phi = p.phi.times_power(-1.0 / p.q).with_dim(p.n - 1);
  if (p.variant == Variant::E) t.r = p.q;
  return t;
}

struct SummabilityResult {
  bool ok = false;
  double C = kInf;
};

/// C = sup_s phi*(s) sum_{j>=0, 2^j s <= 1} 1/phi*(2^j s) over s in {2^-k}.
/// ok requires phi* increasing on the grid and the partial sups to converge.
inline SummabilityResult check_trace_summability(const GrowthFunction& phi_star, int depth = 10) {
  std::vector<double> partial;
  bool increasing = true;
  for (int k = 1; k <= depth; ++k)
    if (!(phi_star(std::ldexp(1.0, -k + 1)) > phi_star(std::ldexp(1.0, -k)))) increasing = false;
  double c = 0;
  for (int k = 0; k <= depth; ++k) {
    double s = std::ldexp(1.0, -k);
    double sum = 0;
    for (int j = 0; j <= k; ++j) sum += 1.0 / phi_star(std::ldexp(s, j));
    c = std::max(c, phi_star(s) * sum);
    partial.push_back(c);
  }
  bool conv = detail::increments_converge(partial);
  return {increasing && conv, conv ? c : kInf};
}

/// True when sum_j 1/(2^{js} phi(2^-j)) converges, judged by the tail terms.
inline bool check_s_condition(const SpaceParams& p, int depth = 12) {
  std::vector<double> partial;
  double acc = 0;
  for (int j = 0; j <= depth; ++j) {
    acc += 1.0 / (std::exp2(j * p.s) * p.phi(std::ldexp(1.0, -j)));
    partial.push_back(acc);
  }
  return detail::increments_converge(partial);
}

}  // namespace morreykit
