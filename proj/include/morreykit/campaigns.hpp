#pragma once

#include <chrono>

#include "corpus.hpp"
#include "maximal.hpp"
#include "quarks.hpp"
#include "sampling.hpp"
#include "trace.hpp"

namespace morreykit {

/// Empirical constants of one quantity at one depth (grid depth J or
/// coefficient depth).
struct DepthStat {
  int depth = 0;
  double sup = 0.0;
  double inf = kInf;
  std::size_t trials = 0;
  std::size_t skipped = 0;
  std::size_t witness_trial = 0;  ///< trial achieving sup
};

struct Series {
  std::string label;
  bool track_inf = false;  ///< the lower constant is also part of the band
  std::vector<DepthStat> by_depth;
};

enum class CampaignKind { Exact, Bounded, Growth };

inline const char* kind_name(CampaignKind k) {
  switch (k) {
    case CampaignKind::Exact: return "exact";
    case CampaignKind::Bounded: return "bounded";
    case CampaignKind::Growth: return "growth";
  }
  return "?";
}

struct Report {
  std::string name;
  std::string law;
  CampaignKind kind = CampaignKind::Bounded;
  std::uint64_t seed = 0;
  double band = 0.25;
  std::vector<Series> series;
  std::vector<std::string> failures;
  std::vector<std::string> checks;  ///< preconditions verified before running
  std::map<std::string, double> stats;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double runtime_s = 0.0;

  Series& add_series(const std::string& label, bool track_inf = false) {
    series.push_back({label, track_inf, {}});
    return series.back();
  }

  const Series& at(const std::string& label) const {
    for (auto& s : series)
      if (s.label == label) return s;
    throw domain_error("report has no series '" + label + "'");
  }

  std::size_t trials() const {
    std::size_t t = 0;
    for (auto& s : series)
      for (auto& d : s.by_depth) t = std::max(t, d.trials + d.skipped);
    return t;
  }

  /// max/min - 1 between the two largest depths; 0 with a single depth.
  static double variation(const Series& s, bool lower = false) {
    if (s.by_depth.size() < 2) return 0.0;
    auto v = [&](const DepthStat& d) { return lower ? d.inf : d.sup; };
    const auto& a = s.by_depth[s.by_depth.size() - 2];
    const auto& b = s.by_depth.back();
    double x = v(a), y = v(b);
    if (!std::isfinite(x) || !std::isfinite(y)) return kInf;
    double lo = std::min(x, y), hi = std::max(x, y);
    if (hi == 0) return 0.0;
    if (lo <= 0) return kInf;
    return hi / lo - 1.0;
  }

  bool finite() const {
    for (auto& s : series)
      for (auto& d : s.by_depth)
        if (!std::isfinite(d.sup)) return false;
    return true;
  }

  bool stable() const {
    for (auto& s : series) {
      if (!(variation(s) < band)) return false;
      if (s.track_inf && !(variation(s, true) < band)) return false;
    }
    return true;
  }

  bool pass() const {
    if (!failures.empty()) return false;
    if (kind == CampaignKind::Bounded) return finite() && stable();
    return true;
  }

  /// Exit status convention: 0 pass, 2 exact failure, 3 band failure.
  int status() const {
    if (pass()) return 0;
    return kind == CampaignKind::Exact || !failures.empty() ? 2 : 3;
  }
};

namespace detail {

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

struct TrialOutcome {
  std::vector<double> ratios;  ///< one per series, NaN when skipped
  std::vector<double> extra;
};

/// Runs trials at one depth and folds them into every series of rep. Each
/// trial writes its own slot, so the merge is independent of scheduling.
template <class Fn>
void run_depth(Report& rep, int depth, std::size_t trials, int jobs, Fn&& fn) {
  std::vector<TrialOutcome> out(trials);
  parallel_for(trials, jobs, [&](std::size_t t) { out[t] = fn(t); });
  for (std::size_t s = 0; s < rep.series.size(); ++s) {
    DepthStat st;
    st.depth = depth;
    for (std::size_t t = 0; t < trials; ++t) {
      double v = s < out[t].ratios.size() ? out[t].ratios[s] : nan();
      if (std::isnan(v)) {
        ++st.skipped;
        continue;
      }
      ++st.trials;
      if (st.trials == 1 || v > st.sup) {
        st.sup = v;
        st.witness_trial = t;
      }
      st.inf = std::min(st.inf, v);
    }
    rep.series[s].by_depth.push_back(st);
  }
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> row{double(t), double(depth)};
    row.insert(row.end(), out[t].ratios.begin(), out[t].ratios.end());
    row.insert(row.end(), out[t].extra.begin(), out[t].extra.end());
    rep.rows.push_back(std::move(row));
  }
}

inline double ratio(double lhs, double rhs) {
  if (rhs == 0) return lhs == 0 ? nan() : kInf;
  return lhs / rhs;
}

class Timer {
 public:
  Timer() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

inline std::vector<double> abs_values(const GridFunction& f) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.data[i]);
  return a;
}

}  // namespace detail

// ---------------------------------------------------------------- Hardy

struct HardyConfig {
  double delta = 0.5;
  double r = 1.0;
  std::size_t trials = 500;
  int length = 64;
  std::uint64_t seed = 1;
  FieldLaw law{0.3, 1.5, false};
  bool dry_run = false;  ///< stop after the precondition checks
};

/// (sum_k (sum_j 2^{-|j-k| delta} A_j)^r)^{1/r}, sup over k for r = inf.
inline double hardy_lhs(const std::vector<double>& A, double delta, double r) {
  const int n = static_cast<int>(A.size());
  std::vector<double> conv(n);
  for (int k = 0; k < n; ++k) {
    KahanSum s;
    for (int j = 0; j < n; ++j) s.add(std::exp2(-std::abs(j - k) * delta) * A[j]);
    conv[k] = s.value();
  }
  return detail::lr_combine(conv, r);
}

/// sum over all d in Z of 2^{-|d| delta w}, to the power 1/w, w = min(1, r):
/// the one-hot value on an infinite sequence and an upper bound for every A.
inline double hardy_bound(double delta, double r) {
  double w = std::min(1.0, r);
  double g = std::exp2(-delta * w);
  return std::pow((1 + g) / (1 - g), 1.0 / w);
}

/// Closed form for A = e_k on a sequence of the given length.
inline double hardy_one_hot(double delta, double r, int k, int length) {
  std::vector<double> t;
  for (int j = 0; j < length; ++j) t.push_back(std::exp2(-std::abs(j - k) * delta));
  return detail::lr_combine(t, r);
}

inline Report hardy_campaign(const HardyConfig& c) {
  if (!(c.delta > 0)) throw precondition_error("hardy: delta must be positive");
  if (!(c.r > 0)) throw precondition_error("hardy: r must be positive");
  detail::Timer timer;
  Report rep;
  rep.name = "hardy";
  rep.kind = CampaignKind::Exact;
  rep.law = c.law.describe();
  rep.seed = c.seed;
  rep.add_series("ratio");
  rep.columns = {"trial", "depth", "ratio"};
  const double bound = hardy_bound(c.delta, c.r);
  rep.stats["bound"] = bound;
  rep.stats["delta"] = c.delta;
  rep.stats["r"] = c.r;
  rep.checks.push_back("delta > 0");
  if (c.dry_run) return rep;
  detail::run_depth(rep, c.length, c.trials, 1, [&](std::size_t t) {
    std::uint64_t s = trial_seed(c.seed, t);
    std::vector<double> A(c.length);
    for (int j = 0; j < c.length; ++j) A[j] = std::abs(law_value(c.law, s, 0, j));
    double rhs = detail::lr_combine(A, c.r);
    double v = rhs == 0 ? 0.0 : hardy_lhs(A, c.delta, c.r) / rhs;
    return detail::TrialOutcome{{v}, {}};
  });
  const auto& d = rep.series[0].by_depth.back();
  if (d.sup > bound * (1.0 + 1e-9))
    rep.failures.push_back("trial " + std::to_string(d.witness_trial) + " ratio " + fmt_double(d.sup) +
                           " exceeds " + fmt_double(bound));
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- maximal

struct MaximalConfig {
  int n = 1;
  double q = 2.0;
  double r = 2.0;
  GrowthFunction phi = GrowthFunction::power(4.0, 1);
  std::vector<int> resolutions{8, 9};
  std::size_t trials = 40;
  int stack = 8;
  int cubes = 6;       ///< indicators per function
  int cube_level = 6;  ///< finest indicator level (must not exceed any resolution)
  std::uint64_t seed = 2;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

/// The three forms of the vector-valued maximal inequality: plain, sup over a
/// stack, and the l^r-valued form.
inline Report maximal_campaign(const MaximalConfig& c) {
  if (!(c.q > 1)) throw precondition_error("maximal: q must exceed 1");
  if (!(c.r > 1)) throw precondition_error("maximal: r must exceed 1");
  auto nk = check_nakai(c.phi, scales_for(c.phi));
  if (!nk.ok) throw precondition_error("maximal: phi fails the Nakai condition required by the l^r form");
  for (int J : c.resolutions)
    if (J < c.cube_level) throw precondition_error("maximal: resolution coarser than the corpus");
  detail::Timer timer;
  Report rep;
  rep.name = "maximal";
  rep.seed = c.seed;
  rep.law = "sum of " + std::to_string(c.cubes) + " dyadic indicators, levels 0.." + std::to_string(c.cube_level) +
            ", lognormal heights";
  rep.checks = {"q > 1", "r > 1", "Nakai condition (eps = " + fmt_double(nk.epsilon) + ")"};
  rep.add_series("plain");
  rep.add_series("sup");
  rep.add_series("vector");
  rep.columns = {"trial", "depth", "plain", "sup", "vector"};
  if (c.dry_run) return rep;
  for (int J : c.resolutions) {
    detail::run_depth(rep, J, c.trials, c.jobs, [&](std::size_t t) {
      std::uint64_t s = trial_seed(c.seed, t);
      const std::size_t size = std::size_t(1) << (J * c.n);
      std::vector<double> sup_f(size, 0), sup_m(size, 0), sum_f(size, 0), sum_m(size, 0);
      double plain = 0;
      for (int i = 0; i < c.stack; ++i) {
        auto f = random_indicators(c.n, J, c.cubes, c.cube_level, mix64(s, i));
        auto a = detail::abs_values(f);
        auto m = maximal_real(a, c.n, J, CubeFamily::AllAligned);
        if (i == 0)
          plain = detail::ratio(morrey_norm_real(m, c.n, J, c.q, c.phi), morrey_norm_real(a, c.n, J, c.q, c.phi));
        for (std::size_t x = 0; x < size; ++x) {
          sup_f[x] = std::max(sup_f[x], a[x]);
          sup_m[x] = std::max(sup_m[x], m[x]);
          sum_f[x] += std::pow(a[x], c.r);
          sum_m[x] += std::pow(m[x], c.r);
        }
      }
      for (std::size_t x = 0; x < size; ++x) {
        sum_f[x] = std::pow(sum_f[x], 1.0 / c.r);
        sum_m[x] = std::pow(sum_m[x], 1.0 / c.r);
      }
      double sup = detail::ratio(morrey_norm_real(sup_m, c.n, J, c.q, c.phi), morrey_norm_real(sup_f, c.n, J, c.q, c.phi));
      double vec = detail::ratio(morrey_norm_real(sum_m, c.n, J, c.q, c.phi), morrey_norm_real(sum_f, c.n, J, c.q, c.phi));
      return detail::TrialOutcome{{plain, sup, vec}, {}};
    });
  }
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- filter invariance

struct FilterConfig {
  SpaceParams params;
  FilterBank bank_a = default_bank();
  FilterBank bank_b = alternate_bank();
  std::vector<int> resolutions{7, 8};
  std::size_t functions = 100;
  int kmax = 12;
  double decay = 1.0;
  std::uint64_t seed = 3;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

inline Report filter_invariance_campaign(const FilterConfig& c) {
  const auto& p = c.params;
  for (const FilterBank* b : {&c.bank_a, &c.bank_b})
    if (!check_bank(*b, p.n, c.resolutions.front()).ok()) throw precondition_error("filter: bank '" + b->name + "' is not admissible");
  Report rep;
  rep.checks = {"bank " + c.bank_a.name + " admissible", "bank " + c.bank_b.name + " admissible"};
  if (p.variant == Variant::E && !std::isinf(p.r)) {
    if (!check_nakai(p.phi, scales_for(p.phi)).ok) throw precondition_error("filter: E-variant with finite r needs the Nakai condition");
    rep.checks.push_back("Nakai condition");
  }
  detail::Timer timer;
  rep.name = "filter_invariance";
  rep.seed = c.seed;
  rep.law = "band-limited, gaussian coefficients, kmax " + std::to_string(c.kmax) + ", decay " + fmt_double(c.decay);
  rep.add_series("ratio", true);
  rep.columns = {"trial", "depth", "ratio", "norm_a", "norm_b"};
  if (c.dry_run) return rep;
  for (int J : c.resolutions) {
    detail::run_depth(rep, J, c.functions, c.jobs, [&](std::size_t t) {
      auto f = random_bandlimited(p.n, J, c.kmax, trial_seed(c.seed, t), c.decay);
      if (p.homogeneous) {
        cplx m = f.integral();
        for (auto& v : f.data) v -= m;
      }
      double a = space_norm(f, p, c.bank_a).value, b = space_norm(f, p, c.bank_b).value;
      return detail::TrialOutcome{{detail::ratio(a, b)}, {a, b}};
    });
  }
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- Peetre characterization

/// N must exceed n/min(1,q) + n (N-variant) or n/min(1,q,r) + n (E-variant).
inline double peetre_threshold(const SpaceParams& p) {
  double w = p.variant == Variant::N ? std::min(1.0, p.q) : std::min({1.0, p.q, p.r});
  return p.n / w + p.n;
}

struct PeetreNorms {
  double starred = 0;
  double plain = 0;
};

/// Norm of f built from psi_j * f and from its Peetre maximal function with
/// exponent N.
inline PeetreNorms peetre_norms(const GridFunction& f, const RychkovPair& pair, const SpaceParams& p, double N) {
  PeetreNorms out;
  const int ml = p.min_level();
  std::vector<double> tp, ts;
  std::vector<double> ap(f.size(), 0.0), as(f.size(), 0.0);
  for (int j = pair.floor_level(); j <= pair.top(); ++j) {
    auto b = pair.apply(f, pair.psi_hat(j));
    auto bs = peetre_of_band(b, j, N);
    double w = std::exp2(j * p.s);
    if (p.variant == Variant::N) {
      tp.push_back(w * morrey_norm(b, p.q, p.phi, ml));
      ts.push_back(w * morrey_norm(bs, p.q, p.phi, ml));
      continue;
    }
    for (std::size_t i = 0; i < ap.size(); ++i) {
      double vp = w * std::abs(b.data[i]), vs = w * std::abs(bs.data[i]);
      if (std::isinf(p.r)) {
        ap[i] = std::max(ap[i], vp);
        as[i] = std::max(as[i], vs);
      } else {
        ap[i] += std::pow(vp, p.r);
        as[i] += std::pow(vs, p.r);
      }
    }
  }
  if (p.variant == Variant::N) {
    out.plain = detail::lr_combine(tp, p.r);
    out.starred = detail::lr_combine(ts, p.r);
    return out;
  }
  if (!std::isinf(p.r))
    for (std::size_t i = 0; i < ap.size(); ++i) {
      ap[i] = std::pow(ap[i], 1.0 / p.r);
      as[i] = std::pow(as[i], 1.0 / p.r);
    }
  out.plain = morrey_norm_real(ap, f.n, f.J, p.q, p.phi, ml);
  out.starred = morrey_norm_real(as, f.n, f.J, p.q, p.phi, ml);
  return out;
}

struct PeetreConfig {
  SpaceParams params;
  double N = 0;  ///< 0 selects threshold + 0.25
  int L = 1;
  std::vector<int> resolutions{7, 8};
  std::size_t trials = 20;
  int kmax = 12;
  double decay = 1.0;
  std::uint64_t seed = 4;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

inline Report peetre_char_campaign(const PeetreConfig& c) {
  const auto& p = c.params;
  const double thr = peetre_threshold(p);
  const double N = c.N > 0 ? c.N : thr + 0.25;
  if (!(N > thr)) throw precondition_error("peetre: N = " + fmt_double(N) + " must exceed " + fmt_double(thr));
  if (!is_in_Gq(p.phi, p.q, scales_for(p.phi))) throw precondition_error("peetre: phi is not in G_q");
  detail::Timer timer;
  Report rep;
  rep.name = "peetre_char";
  rep.seed = c.seed;
  rep.law = "band-limited, gaussian coefficients, kmax " + std::to_string(c.kmax);
  rep.checks = {"N > " + fmt_double(thr), "phi in G_q"};
  rep.stats["N"] = N;
  rep.stats["threshold"] = thr;
  rep.add_series("ratio");
  rep.columns = {"trial", "depth", "ratio", "starred", "plain"};
  if (c.dry_run) return rep;
  for (int J : c.resolutions) {
    RychkovPair pair(p.n, J, c.L, p.homogeneous, p.hom_floor);
    detail::run_depth(rep, J, c.trials, c.jobs, [&](std::size_t t) {
      auto f = random_bandlimited(p.n, J, c.kmax, trial_seed(c.seed, t), c.decay);
      auto nr = peetre_norms(f, pair, p, N);
      return detail::TrialOutcome{{detail::ratio(nr.starred, nr.plain)}, {nr.starred, nr.plain}};
    });
  }
  for (auto& d : rep.series[0].by_depth)
    if (d.trials > 0 && d.inf < 1.0)
      rep.failures.push_back("starred norm below the plain norm at depth " + std::to_string(d.depth));
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- multiplier

/// Multiplier shapes on the frequency side, evaluated at the rescaled
/// variable xi / d_j.
enum class MultiplierFamily { Unit, Smooth, Rough };

inline Window multiplier_window(MultiplierFamily fam, std::uint64_t seed) {
  switch (fam) {
    case MultiplierFamily::Unit:
      return [](const double* xi, int n) { return plateau(sup_norm(xi, n), 3.0, 4.0); };
    case MultiplierFamily::Smooth:
    case MultiplierFamily::Rough: {
      std::vector<double> amp(4), ctr(4 * 8), freq(4);
      for (int i = 0; i < 4; ++i) {
        amp[i] = hash_normal(mix64(seed, 10 + i));
        for (int k = 0; k < 8; ++k) ctr[i * 8 + k] = 4.0 * hash_unit(mix64(seed, 100 + 8 * i + k)) - 2.0;
        freq[i] = fam == MultiplierFamily::Rough ? 6.0 + 6.0 * hash_unit(mix64(seed, 200 + i)) : 0.0;
      }
      return [amp, ctr, freq](const double* xi, int n) {
        double v = 0;
        for (int i = 0; i < 4; ++i) {
          double r2 = 0, ph = 0;
          for (int k = 0; k < n; ++k) {
            double d = xi[k] - ctr[i * 8 + k];
            r2 += d * d;
            ph += xi[k];
          }
          v += amp[i] * std::exp(-r2) * std::cos(freq[i] * ph);
        }
        return v;
      };
    }
  }
  return {};
}

inline MultiplierFamily parse_multiplier_family(const std::string& s) {
  if (s == "unit") return MultiplierFamily::Unit;
  if (s == "smooth") return MultiplierFamily::Smooth;
  if (s == "rough") return MultiplierFamily::Rough;
  throw domain_error("unknown multiplier family '" + s + "'");
}

struct MultiplierConfig {
  SpaceParams params;
  double nu = 0;  ///< 0 selects threshold + 0.5
  MultiplierFamily family = MultiplierFamily::Smooth;
  std::vector<int> resolutions{7, 8};
  std::size_t trials = 20;
  int kmax = 20;
  double decay = 0.5;
  std::uint64_t seed = 5;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

inline double multiplier_threshold(const SpaceParams& p) {
  return p.n / std::min({1.0, p.q, p.r}) + p.n / 2.0;
}

/// For each band f_j (spectrum in Q(3 2^j), d_j = 2^j) the ratio
/// ||(H(2^-j D) f_j)^*|| / (||H||_{H^nu_2} ||f_j||), Peetre exponent n/eta
/// with eta = min(1,q,r)/2; sup over j.
inline Report multiplier_campaign(const MultiplierConfig& c) {
  const auto& p = c.params;
  const double thr = multiplier_threshold(p);
  const double nu = c.nu > 0 ? c.nu : thr + 0.5;
  if (!(nu > thr)) throw precondition_error("multiplier: nu = " + fmt_double(nu) + " must exceed " + fmt_double(thr));
  if (!is_in_Gq(p.phi, p.q, scales_for(p.phi))) throw precondition_error("multiplier: phi is not in G_q");
  detail::Timer timer;
  Report rep;
  rep.name = "multiplier";
  rep.seed = c.seed;
  rep.law = "band-limited, kmax " + std::to_string(c.kmax);
  rep.checks = {"nu > " + fmt_double(thr), "phi in G_q"};
  const double eta = std::min({1.0, p.q, p.r}) / 2.0;
  rep.stats["nu"] = nu;
  rep.stats["peetre_exponent"] = p.n / eta;
  rep.add_series("ratio");
  rep.columns = {"trial", "depth", "ratio", "sobolev"};
  if (c.dry_run) return rep;
  const FilterBank bank = default_bank();
  for (int J : c.resolutions) {
    detail::run_depth(rep, J, c.trials, c.jobs, [&](std::size_t t) {
      std::uint64_t s = trial_seed(c.seed, t);
      auto H = multiplier_window(c.family, s);
      const int M = p.n == 1 ? 640 : 160;
      double sob = sobolev_norm(FrequencySamples::sample([&](const double* x, int n) { return cplx(H(x, n)); }, p.n, M, 16.0 / M), nu);
      auto f = random_bandlimited(p.n, J, c.kmax, s, c.decay);
      BandSet bs(f, bank);
      double best = 0;
      bool any = false;
      for (int j = 1; j <= bs.top(); ++j) {
        auto fj = bs.band(j);
        double den = morrey_norm(fj, p.q, p.phi);
        if (den < 1e-12 * f.max_abs()) continue;
        auto hj = BandSet(fj, bank).multiplier([&](const double* xi, int n) {
          double buf[8];
          for (int k = 0; k < n; ++k) buf[k] = std::ldexp(xi[k], -j);
          return H(buf, n);
        });
        auto star = peetre_of_band(hj, j, p.n / eta);
        best = std::max(best, morrey_norm(star, p.q, p.phi) / (sob * den));
        any = true;
      }
      return detail::TrialOutcome{{any ? best : detail::nan()}, {sob}};
    });
  }
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- pointwise multiplication

struct PointwiseConfig {
  SpaceParams params;
  int k = 2;
  std::vector<int> resolutions{7, 8};
  std::size_t trials = 20;
  int kmax_f = 16;
  int kmax_g = 2;
  double decay = 1.0;
  std::uint64_t seed = 6;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

/// sum over |alpha| <= k of sup |d^alpha g|.
inline double bc_norm(const GridFunction& g, int k) {
  double s = 0;
  for (auto& a : multi_indices(g.n, k)) s += (abs_multi(a) == 0 ? g : spectral_derivative(g, a)).max_abs();
  return s;
}

inline Report pointwise_mult_campaign(const PointwiseConfig& c) {
  const auto& p = c.params;
  double sigma = p.variant == Variant::N ? p.sigma_r() : p.sigma_qr();
  if (!(c.k > p.s && p.s > sigma))
    throw precondition_error("pointwise: need k > s > " + fmt_double(sigma));
  detail::Timer timer;
  Report rep;
  rep.name = "pointwise_mult";
  rep.seed = c.seed;
  rep.law = "f band-limited kmax " + std::to_string(c.kmax_f) + ", g = 1.5 + band-limited kmax " + std::to_string(c.kmax_g);
  rep.checks = {"k > s > " + fmt_double(sigma)};
  rep.add_series("ratio");
  rep.columns = {"trial", "depth", "ratio", "bc_norm"};
  if (c.dry_run) return rep;
  const FilterBank bank = default_bank();
  for (int J : c.resolutions) {
    detail::run_depth(rep, J, c.trials, c.jobs, [&](std::size_t t) {
      std::uint64_t s = trial_seed(c.seed, t);
      auto f = random_bandlimited(p.n, J, c.kmax_f, s, c.decay);
      auto g = random_bandlimited(p.n, J, c.kmax_g, mix64(s, 77));
      double gm = g.max_abs();
      for (auto& v : g.data) v = 1.5 + v / (gm > 0 ? gm : 1.0);
      GridFunction gf = f;
      for (std::size_t i = 0; i < gf.size(); ++i) gf.data[i] *= g.data[i];
      double bc = bc_norm(g, c.k);
      double v = detail::ratio(space_norm(gf, p, bank).value, bc * space_norm(f, p, bank).value);
      return detail::TrialOutcome{{v}, {bc}};
    });
  }
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- band sup example

struct BandSupConfig {
  SpaceParams params;
  std::vector<int> resolutions{7, 8};
  std::size_t trials = 20;
  int kmax = 20;
  double decay = 0.5;
  std::uint64_t seed = 7;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

/// Theta(xi) = theta(3 xi / 2): supported in Q(2).
inline Window band_sup_window(const FilterBank& bank) {
  return [th = bank.theta](const double* xi, int n) {
    double buf[8];
    for (int k = 0; k < n; ++k) buf[k] = 1.5 * xi[k];
    return th(buf, n);
  };
}

/// sup over j of phi(2^-j) sup|Theta_j(D) f| / ||Theta_j(D) f||.
inline double band_sup_ratio(const GridFunction& f, const SpaceParams& p, const FilterBank& bank = default_bank()) {
  auto Th = band_sup_window(bank);
  BandSet bs(f, bank);
  // bands at FFT round-off level carry no signal
  const double floor = 1e-12 * f.max_abs();
  double best = detail::nan();
  for (int j = 0; j <= f.J; ++j) {
    auto b = bs.multiplier([&](const double* xi, int n) {
      double buf[8];
      for (int k = 0; k < n; ++k) buf[k] = std::ldexp(xi[k], -j);
      return Th(buf, n);
    });
    if (b.max_abs() <= floor) continue;
    double den = morrey_norm(b, p.q, p.phi);
    double v = p.phi(std::ldexp(1.0, -j)) * b.max_abs() / den;
    best = std::isnan(best) ? v : std::max(best, v);
  }
  return best;
}

inline Report band_sup_campaign(const BandSupConfig& c) {
  const auto& p = c.params;
  if (!is_in_Gq(p.phi, p.q, scales_for(p.phi))) throw precondition_error("band_sup: phi is not in G_q");
  detail::Timer timer;
  Report rep;
  rep.name = "band_sup";
  rep.seed = c.seed;
  rep.law = "band-limited, kmax " + std::to_string(c.kmax);
  rep.checks = {"phi in G_q"};
  rep.add_series("ratio");
  rep.columns = {"trial", "depth", "ratio"};
  if (c.dry_run) return rep;
  for (int J : c.resolutions) {
    detail::run_depth(rep, J, c.trials, c.jobs, [&](std::size_t t) {
      auto f = random_bandlimited(p.n, J, c.kmax, trial_seed(c.seed, t), c.decay);
      return detail::TrialOutcome{{band_sup_ratio(f, p)}, {}};
    });
  }
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- embedding with log growth

struct EmbeddingConfig {
  int n = 1;
  double p = 4.0;
  double q = 2.0;
  double r = 0.5;
  std::vector<int> depths{6, 8};
  std::size_t trials = 100;
  FieldLaw law{0.3, 1.0, false};
  std::uint64_t seed = 8;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

/// phi(t) = log(2 + 1/t)^{-1/min(1,r)} for the left side; exponent may be
/// overridden to study the sharpness of min(1,r).
inline SpaceParams embedding_lhs_params(int n, double q, double r, double exponent = 0) {
  SpaceParams L;
  L.n = n;
  L.q = q;
  L.r = r;
  L.s = 0;
  L.variant = Variant::E;
  L.phi = GrowthFunction::log_inv(exponent > 0 ? exponent : 1.0 / std::min(1.0, r), n);
  return L;
}

inline SpaceParams embedding_rhs_params(int n, double p, double q) {
  SpaceParams R;
  R.n = n;
  R.q = q;
  R.r = kInf;
  R.s = n / p;
  R.variant = Variant::E;
  R.phi = GrowthFunction::power(p, n);
  return R;
}

inline void check_embedding_params(double p, double q, double r) {
  if (!(1 <= q && q <= p && std::isfinite(p))) throw precondition_error("embedding: need 1 <= q <= p < inf");
  if (!(0 < r && r < q)) throw precondition_error("embedding: need 0 < r < q");
}

inline Report embedding_campaign(const EmbeddingConfig& c) {
  check_embedding_params(c.p, c.q, c.r);
  detail::Timer timer;
  Report rep;
  rep.name = "embedding";
  rep.seed = c.seed;
  rep.law = c.law.describe() + " * 2^{-jn/p}";
  rep.checks = {"1 <= q <= p < inf", "0 < r < q"};
  rep.add_series("ratio");
  rep.columns = {"trial", "depth", "ratio"};
  if (c.dry_run) return rep;
  auto L = embedding_lhs_params(c.n, c.q, c.r);
  auto R = embedding_rhs_params(c.n, c.p, c.q);
  for (int D : c.depths) {
    detail::run_depth(rep, D, c.trials, c.jobs, [&](std::size_t t) {
      auto lam = random_field(c.n, 0, D, c.law, trial_seed(c.seed, t), [&](int j) { return std::exp2(-j * c.n / c.p); });
      return detail::TrialOutcome{{detail::ratio(seq_norm(lam, L).value, seq_norm(lam, R).value)}, {}};
    });
  }
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- counterexample growth

struct CounterexampleConfig {
  int n = 2;
  double p = 2.0;
  double q = 1.5;
  double r = 0.5;
  int N_lo = 2, N_hi = 12;
  double slack_low = 0.15, slack_high = 0.35, flat = 0.15;
  bool dry_run = false;  ///< stop after the precondition checks
};

/// Coefficients of f_N = sum_{k=1}^N g(2^k x): one unit coefficient on the
/// cube at the origin of every level 1..N.
inline CoeffField counterexample_field(int n, int N) {
  CoeffField lam(n, 0, N);
  for (int k = 1; k <= N; ++k) lam.at(k, 0) = 1.0;
  return lam;
}

/// Ratio of the log-growth E-norm to the E^{n/p}_{pq,inf} norm for f_N with
/// growth exponent e (1 is the too-weak choice, 1/min(1,r) the correct one).
inline double counterexample_ratio(const CounterexampleConfig& c, int N, double e) {
  auto lam = counterexample_field(c.n, N);
  return seq_norm(lam, embedding_lhs_params(c.n, c.q, c.r, e)).value /
         seq_norm(lam, embedding_rhs_params(c.n, c.p, c.q)).value;
}

inline Report counterexample_growth(const CounterexampleConfig& c) {
  if (!(c.r < 1 && c.r > 0)) throw precondition_error("counterexample: need 0 < r < 1");
  check_embedding_params(c.p, c.q, c.r);
  detail::Timer timer;
  Report rep;
  rep.name = "counterexample_growth";
  rep.kind = CampaignKind::Growth;
  rep.law = "deterministic: unit coefficient at the origin cube of levels 1..N";
  rep.checks = {"0 < r < 1", "1 <= q <= p < inf"};
  rep.columns = {"N", "ratio_weak", "ratio_correct"};
  if (c.dry_run) return rep;
  const double ec = 1.0 / std::min(1.0, c.r);
  std::vector<double> x, yw, yc;
  for (int N = c.N_lo; N <= c.N_hi; ++N) {
    double w = counterexample_ratio(c, N, 1.0), k = counterexample_ratio(c, N, ec);
    rep.rows.push_back({double(N), w, k});
    x.push_back(std::log(N));
    yw.push_back(std::log(w));
    yc.push_back(std::log(k));
  }
  const double target = 1.0 / c.r - 1.0;
  const double sw = fit_slope(x, yw), sc = fit_slope(x, yc);
  rep.stats["slope_weak"] = sw;
  rep.stats["slope_correct"] = sc;
  rep.stats["target"] = target;
  if (sw < target - c.slack_low || sw > target + c.slack_high)
    rep.failures.push_back("growth exponent " + fmt_double(sw) + " outside [" + fmt_double(target - c.slack_low) + ", " +
                           fmt_double(target + c.slack_high) + "]");
  if (!(std::abs(sc) < c.flat))
    rep.failures.push_back("correct-growth ratio not flat: slope " + fmt_double(sc));
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- trace

struct TraceCampaignConfig {
  SpaceParams params;
  std::vector<int> depths{6, 8};
  std::size_t trials = 200;
  FieldLaw law{0.2, 1.0, false, 4.0};
  std::uint64_t seed = 9;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

inline Report trace_campaign(const TraceCampaignConfig& c) {
  auto tp0 = make_trace_problem(c.params, c.depths.front(), c.seed);
  detail::Timer timer;
  Report rep;
  rep.name = "trace";
  rep.seed = c.seed;
  rep.law = c.law.describe() + " * 2^{-js}/phi(2^-j)";
  auto tv = validate_trace(c.params);
  rep.checks = {"s > " + fmt_double(tv.s_threshold), "phi in G_q", "phi* increasing",
                "phi* summable (C = " + fmt_double(tv.summability_C) + ")"};
  rep.add_series("constant_I");
  rep.add_series("constant_II");
  rep.add_series("constant_ext");
  rep.columns = {"trial", "depth", "constant_I", "constant_II", "constant_ext"};
  if (c.dry_run) return rep;
  const int jmin = c.params.homogeneous ? c.params.hom_floor : 0;
  auto weight = level_normalizer(c.params);
  for (int D : c.depths) {
    auto tp = tp0;
    tp.depth = D;
    detail::run_depth(rep, D, c.trials, c.jobs, [&](std::size_t t) {
      auto lam = random_field(c.params.n, jmin, D, c.law, trial_seed(c.seed, t), weight);
      auto b1 = trace_bound_I(lam, tp), b2 = trace_bound_II(lam, tp);
      auto lp = trace_coeff(lam).first;
      auto ex = extension_bound(lp, tp);
      auto flag = [](const TraceBound& b) { return b.zero_denominator ? detail::nan() : b.value; };
      double e = flag(ex.total);
      return detail::TrialOutcome{{flag(b1), flag(b2), e}, {}};
    });
  }
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- atomic decomposition

struct DecompositionConfig {
  SpaceParams params;
  int K = 1;
  int L = 1;
  std::vector<int> resolutions{7, 8};
  std::size_t functions = 50;
  int kmax = 12;
  double decay = 1.0;
  double residual_tol = 1e-8;
  std::uint64_t seed = 10;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

/// Round trip residual (exact), seq_norm(lambda)/space_norm(f) and its inverse.
inline Report decomposition_campaign(const DecompositionConfig& c) {
  const auto& p = c.params;
  detail::Timer timer;
  Report rep;
  rep.name = "decomposition";
  rep.seed = c.seed;
  rep.law = "band-limited, gaussian coefficients, kmax " + std::to_string(c.kmax);
  rep.add_series("coefficient");
  rep.add_series("synthesis");
  rep.columns = {"trial", "depth", "coefficient", "synthesis", "residual"};
  if (!is_in_Gq(p.phi, p.q, scales_for(p.phi))) throw precondition_error("decomposition: phi is not in G_q");
  rep.checks = {"phi in G_q"};
  if (c.dry_run) return rep;
  const FilterBank bank = default_bank();
  double worst = 0;
  for (int J : c.resolutions) {
    RychkovPair pair(p.n, J, c.L, p.homogeneous, p.hom_floor);
    detail::run_depth(rep, J, c.functions, 1, [&](std::size_t t) {
      auto f = random_bandlimited(p.n, J, c.kmax, trial_seed(c.seed, t), c.decay);
      if (p.homogeneous) {
        cplx m = f.integral();
        for (auto& v : f.data) v -= m;
      }
      auto dec = atomic_analyze(f, pair, c.K, c.jobs);
      double res = (synthesize(dec) - f).l2() / f.l2();
      double sn = space_norm(f, p, bank).value, qn = seq_norm(dec.lambda, p).value;
      return detail::TrialOutcome{{detail::ratio(qn, sn), detail::ratio(sn, qn)}, {res}};
    });
  }
  for (auto& row : rep.rows) worst = std::max(worst, row.back());
  rep.stats["max_residual"] = worst;
  if (!(worst < c.residual_tol)) rep.failures.push_back("round trip residual " + fmt_double(worst));
  rep.runtime_s = timer.seconds();
  return rep;
}

// ---------------------------------------------------------------- quarks

struct QuarkCampaignConfig {
  SpaceParams params;
  std::vector<int> resolutions{8, 9};
  std::size_t functions = 10;
  int kmax = 24;
  int beta_cutoff = 12;
  std::uint64_t seed = 11;
  int jobs = 1;
  bool dry_run = false;  ///< stop after the precondition checks
};

/// Coefficient constant per resolution plus the fitted log2 decay of the
/// reconstruction residual per unit of the beta cutoff (worst over the corpus).
inline Report quark_campaign(const QuarkCampaignConfig& c) {
  const auto& p = c.params;
  detail::Timer timer;
  Report rep;
  rep.name = "quark";
  rep.seed = c.seed;
  rep.law = "band-limited, gaussian coefficients, kmax " + std::to_string(c.kmax);
  QuarkGen gen(p.n);
  rep.stats["rho"] = gen.rho;
  rep.stats["R"] = gen.R;
  rep.add_series("coefficient");
  rep.columns = {"trial", "depth", "coefficient", "decay_rate", "final_residual"};
  if (!is_in_Gq(p.phi, p.q, scales_for(p.phi))) throw precondition_error("quark: phi is not in G_q");
  rep.checks = {"phi in G_q"};
  if (c.dry_run) return rep;
  double worst_rate = -kInf, worst_final = 0;
  for (int J : c.resolutions) {
    detail::run_depth(rep, J, c.functions, c.jobs, [&](std::size_t t) {
      auto f = random_bandlimited(p.n, J, c.kmax, trial_seed(c.seed, t));
      if (p.homogeneous) {
        cplx m = f.integral();
        for (auto& v : f.data) v -= m;
      }
      auto qa = quark_analyze(f, gen, default_bank(), c.beta_cutoff, p.homogeneous);
      std::vector<double> x, y;
      double last = 0;
      for (int B = 0; B <= c.beta_cutoff; ++B) {
        last = quark_residual(f, truncate_beta(qa.coeffs, B), p.homogeneous);
        if (last > 1e-13) {
          x.push_back(B);
          y.push_back(std::log2(last));
        }
      }
      double rate = x.size() >= 2 ? fit_slope(x, y) : -kInf;
      return detail::TrialOutcome{{quark_coefficient_constant(qa, p)}, {rate, last}};
    });
  }
  for (auto& row : rep.rows) {
    worst_rate = std::max(worst_rate, row[3]);
    worst_final = std::max(worst_final, row[4]);
  }
  const double need = -(gen.rho - gen.R - 0.5);
  rep.stats["decay_rate"] = worst_rate;
  rep.stats["required_rate"] = need;
  rep.stats["final_residual"] = worst_final;
  if (!(worst_rate <= need)) rep.failures.push_back("residual decay rate " + fmt_double(worst_rate) + " above " + fmt_double(need));
  rep.runtime_s = timer.seconds();
  return rep;
}

}  // namespace morreykit
