// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. Campaign reports and witnesses go to
// ./acceptance_out (relative to the working directory).

#include <cstdio>
#include <iostream>

#include <morreykit/morreykit.hpp>

using namespace morreykit;

namespace {

const fs::path kOut = "acceptance_out";

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("FAILED " + what);
    }
  }
  void note(const std::string& s) { notes.push_back(s); }
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o, double seconds) {
  std::printf("criterion %2d %-34s %s  (%.1fs)\n", id, title.c_str(), o.pass ? "PASS" : "FAIL", seconds);
  for (auto& n : o.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string g6(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

/// Runs one campaign, writes its CSV, witness and summary, returns the report.
Report run_logged(const json& cfg, Outcome& o, const std::string& stem) {
  Report rep = run_campaign(cfg);
  auto s = write_campaign_outputs(kOut, stem, rep, cfg);
  std::string line = stem + ": " + (rep.pass() ? "pass" : "fail");
  for (auto& se : rep.series) {
    line += "  " + se.label + " [";
    for (std::size_t k = 0; k < se.by_depth.size(); ++k)
      line += (k ? ", " : "") + std::to_string(se.by_depth[k].depth) + ":" + g6(se.by_depth[k].sup);
    line += "] var " + g6(Report::variation(se));
    if (se.track_inf) line += " inf-var " + g6(Report::variation(se, true));
  }
  o.note(line);
  for (auto& f : rep.failures) o.note("  " + f);
  o.require(rep.pass(), stem);
  return rep;
}

std::vector<GrowthFunction> four_families(int n, double q) {
  auto scales = dyadic_scales(-12, 2);
  return {GrowthFunction::power(2 * q, n), GrowthFunction::power_log(q, 0.5, n), GrowthFunction::log_inv(0.5, n),
          normalize_star(GrowthFunction::power_log(1.5 * q, 0.3, n), q, scales)};
}

GridFunction gaussian_grid(int n, int J, std::uint64_t seed) {
  GridFunction f(n, J);
  for (std::size_t i = 0; i < f.size(); ++i) f.data[i] = {hash_normal(mix64(seed, 2 * i)), hash_normal(mix64(seed, 2 * i + 1))};
  return f;
}

DyadicCube random_cube(int n, int jlo, int jhi, std::uint64_t seed) {
  DyadicCube Q;
  Q.j = jlo + static_cast<int>(hash_unit(seed) * (jhi - jlo + 1));
  for (int k = 0; k < n; ++k) Q.m.push_back(static_cast<std::int64_t>(hash_unit(seed + 1 + k) * std::ldexp(1.0, Q.j)));
  return Q;
}

// ---------------------------------------------------------------- 1

Outcome exact_identities() {
  Outcome o;
  const int n = 2, J = 8;
  const double tol = 1e-12;
  // (a) ||chi_Q|| = phi(side)
  double worst_a = 0;
  for (double q : {1.0, 2.0}) {
    auto fam = four_families(n, q);
    for (auto& phi : fam) o.require(is_in_Gq(phi, q, dyadic_scales(-J, 0)), "family in G_q");
    for (int t = 0; t < 25; ++t) {
      auto Q = random_cube(n, 0, J, mix64(100 + q, t));
      GridFunction chi(n, J);
      for (auto c : box_cells(dilate(Q, 1.0), chi.G())) chi.data[c] = 1.0;
      for (auto& phi : fam) {
        double want = phi(Q.side());
        worst_a = std::max(worst_a, std::abs(morrey_norm(chi, q, phi) - want) / want);
      }
    }
  }
  o.note("(a) 50 cubes x 4 families, worst relative error " + g6(worst_a));
  o.require(worst_a <= tol, "(a) indicator identity");
  // (b) || |f|^u ||_{q, phi} = || f ||_{uq, phi^{1/u}}^u
  double worst_b = 0;
  for (int t = 0; t < 100; ++t) {
    auto f = gaussian_grid(n, J, 500 + t);
    double q = t % 2 ? 2.0 : 0.5;
    auto phi = four_families(n, q)[t % 4];
    for (double u : {0.5, 2.0, 3.0}) {
      double lhs = morrey_norm(abs_pow(f, u), q, phi);
      double rhs = std::pow(morrey_norm(f, u * q, phi.raised(1 / u)), u);
      worst_b = std::max(worst_b, std::abs(lhs - rhs) / rhs);
    }
  }
  o.note("(b) 100 functions x u in {0.5,2,3}, worst relative error " + g6(worst_b));
  o.require(worst_b <= tol, "(b) power identity");
  // (c) trace(extend(lambda')) = lambda'
  int exact = 0;
  for (int t = 0; t < 100; ++t) {
    FieldLaw law{0.3, 1.0, true};
    auto lp = random_field(1, t % 2 ? -4 : 0, 7, law, trial_seed(77, t));
    if (trace_coeff(extend_coeff(lp)).first == lp) ++exact;
  }
  o.note("(c) trace of extension identical on " + std::to_string(exact) + "/100 fields");
  o.require(exact == 100, "(c) trace-extend identity");
  return o;
}

// ---------------------------------------------------------------- 2

Outcome triangle_inequalities() {
  Outcome o;
  const double margin = 1e-9;
  const std::vector<double> exps{0.5, 1.0, 2.0};
  double worst[3] = {0, 0, 0};
  for (int t = 0; t < 1000; ++t) {
    double q = exps[t % 3], r = exps[(t / 3) % 3];
    SpaceParams p;
    p.n = 1;
    p.q = q;
    p.r = r;
    p.s = 0.3;
    p.variant = (t / 9) % 2 ? Variant::N : Variant::E;
    p.phi = GrowthFunction::power(2 * q, 1);
    auto f = gaussian_grid(1, 6, mix64(1, t)), g = gaussian_grid(1, 6, mix64(2, t));
    auto m = min_triangle_check(f, g, NormKind::Morrey, p);
    auto s = min_triangle_check(f, g, NormKind::Space, p);
    FieldLaw law{0.3, 1.0, true};
    auto a = random_field(1, 0, 6, law, mix64(3, t)), b = random_field(1, 0, 6, law, mix64(4, t));
    auto c = min_triangle_check(a, b, p);
    worst[0] = std::max(worst[0], m.lhs / m.rhs - 1);
    worst[1] = std::max(worst[1], s.lhs / s.rhs - 1);
    worst[2] = std::max(worst[2], c.lhs / c.rhs - 1);
  }
  o.note("worst (lhs/rhs - 1): morrey " + g6(worst[0]) + ", function space " + g6(worst[1]) + ", sequence " + g6(worst[2]));
  for (double w : worst) o.require(w <= margin, "triangle margin");
  return o;
}

// ---------------------------------------------------------------- 3

Outcome maximal_envelope() {
  Outcome o;
  const int J = 7, G = 1 << J;
  double lo_in = kInf, hi_in = 0, lo_cmp = kInf, hi_cmp = 0;
  for (int n : {1, 2}) {
    double cmp_lo_bound = std::pow(9.0, -n) / 2, cmp_hi_bound = 2 * std::pow(4.0, n);
    double lo = kInf, hi = 0;
    for (int t = 0; t < 25; ++t) {
      auto R = random_cube(n, 2, J - 1, mix64(900 + n, t));
      GridFunction chi(n, J);
      for (auto c : box_cells(dilate(R, 1.0), G)) chi.data[c] = 1.0;
      auto M = hl_maximal(chi);
      for (auto c : box_cells(dilate(R, 3.0), G)) {
        double v = M.data[c].real();
        lo_in = std::min(lo_in, v * std::pow(3.0, n));
        hi_in = std::max(hi_in, v);
      }
      auto ctr = R.center();
      std::vector<int> x(n);
      for (std::size_t i = 0; i < chi.size(); ++i) {
        chi.coords(i, x.data());
        double d2 = 0;
        for (int k = 0; k < n; ++k) {
          double dx = std::abs((x[k] + 0.5) / G - ctr[k]);
          dx = std::min(dx, 1 - dx);
          d2 += dx * dx;
        }
        double env = R.volume() / (R.volume() + std::pow(std::sqrt(d2), n));
        double ratio = M.data[i].real() / env;
        lo = std::min(lo, ratio / cmp_lo_bound);
        hi = std::max(hi, ratio / cmp_hi_bound);
      }
    }
    lo_cmp = std::min(lo_cmp, lo);
    hi_cmp = std::max(hi_cmp, hi);
  }
  o.note("on 3R: min 3^n M = " + g6(lo_in) + ", max M = " + g6(hi_in));
  o.note("comparability: min ratio/lower bound " + g6(lo_cmp) + ", max ratio/upper bound " + g6(hi_cmp));
  o.require(lo_in >= 1 - 1e-12 && hi_in <= 1 + 1e-12, "3^-n <= M <= 1 on 3R");
  o.require(lo_cmp >= 1 && hi_cmp <= 1, "two-sided comparability");
  return o;
}

// ---------------------------------------------------------------- suites by name

json suite_entries(const std::string& name, const std::string& tag_prefix) {
  json out = json::array();
  for (auto& c : acceptance_suite())
    if (c["name"] == name && c.value("tag", name).rfind(tag_prefix, 0) == 0) out.push_back(c);
  return out;
}

bool is_hom(const json& c) { return c.contains("params") && c["params"].is_string() && c["params"].get<std::string>().ends_with("-hom"); }

Outcome run_entries(const std::string& name, const std::string& prefix, int want_hom) {
  Outcome o;
  int k = 0;
  for (auto& c : suite_entries(name, prefix)) {
    if (want_hom >= 0 && is_hom(c) != bool(want_hom)) continue;
    run_logged(c, o, c.value("tag", name));
    ++k;
  }
  o.require(k > 0, "no campaigns selected");
  return o;
}

// ---------------------------------------------------------------- 4

Outcome hardy() {
  Outcome o;
  detail::Timer t;
  for (auto& c : suite_entries("hardy", "hardy")) {
    Report rep = run_campaign(c);
    write_campaign_outputs(kOut, c["tag"], rep, c);
    const auto& d = rep.series[0].by_depth[0];
    o.note(c["tag"].get<std::string>() + ": sup " + g6(d.sup) + " <= bound " + g6(rep.stats.at("bound")) + " over " +
           std::to_string(d.trials + d.skipped) + " trials");
    o.require(rep.pass() && d.trials + d.skipped == 500, c["tag"].get<std::string>());
  }
  double s = t.seconds();
  o.note("total " + g6(s) + " s");
  o.require(s < 10, "runtime under 10 s");
  return o;
}

// ---------------------------------------------------------------- 6

Outcome maximal() {
  Outcome o;
  for (auto& c : suite_entries("maximal", "maximal")) {
    auto phi = growth_from_json(c["phi"], 1);
    auto nk = check_nakai(phi, scales_for(phi));
    o.note(c["tag"].get<std::string>() + ": Nakai " + (nk.ok ? "holds" : "fails") + " (eps " + g6(nk.epsilon) + ")");
    o.require(nk.ok, "Nakai precondition");
    if (nk.ok) run_logged(c, o, c["tag"]);
  }
  return o;
}

// ---------------------------------------------------------------- 7

Outcome decomposition(bool hom) {
  Outcome o;
  for (auto& c : suite_entries("decomposition", "decomposition")) {
    if (is_hom(c) != hom) continue;
    auto rep = run_logged(c, o, c["tag"]);
    o.note("  max residual " + g6(rep.stats.at("max_residual")) + " over " + std::to_string(rep.at("coefficient").by_depth[0].trials) +
           " functions");
    o.require(rep.stats.at("max_residual") < 1e-8, "residual");
  }
  return o;
}

// ---------------------------------------------------------------- 8

Outcome band_decay() {
  Outcome o;
  const int n = 1, J = 12;
  const double P = 0.5, N = 4.0;
  for (auto [K, L] : std::vector<std::pair<int, int>>{{1, -1}, {2, 0}, {2, 1}}) {
    DyadicCube Q{8, {100}};
    auto a = make_test_atom(n, J, Q, K, L);
    auto pa = band_decay_profile(a, Q, default_bank(), P);
    auto b = make_test_molecule(n, J, DyadicCube{8, {60}}, K, L, N);
    auto pb = band_decay_profile(b, DyadicCube{8, {60}}, default_bank(), N);
    std::string kl = "(K,L)=(" + std::to_string(K) + "," + std::to_string(L) + ")";
    o.note(kl + " atom high " + g6(pa.high_slope) + " (<= " + g6(-K + 0.3) + "), low " + g6(pa.low_slope) + " (<= " +
           g6(L + 1 + n - P + 0.3) + ");  molecule high " + g6(pb.high_slope) + ", low " + g6(pb.low_slope) + " (<= " +
           g6(L + 1 + n - N + 0.3) + ")");
    o.require(pa.high_slope <= -K + 0.3, kl + " atom high slope");
    o.require(pa.low_slope <= L + 1 + n - P + 0.3, kl + " atom low slope");
    o.require(pb.high_slope <= -K + 0.3, kl + " molecule high slope");
    o.require(pb.low_slope <= L + 1 + n - N + 0.3, kl + " molecule low slope");
  }
  return o;
}

// ---------------------------------------------------------------- 9

Outcome quark() {
  Outcome o;
  for (auto& c : suite_entries("quark", "quark")) {
    auto rep = run_logged(c, o, "quark");
    o.note("  residual decay rate " + g6(rep.stats.at("decay_rate")) + " per unit |beta| (need <= " +
           g6(rep.stats.at("required_rate")) + "), final residual " + g6(rep.stats.at("final_residual")));
  }
  return o;
}

// ---------------------------------------------------------------- 10

Outcome trace(bool hom) {
  Outcome o;
  for (auto& c : suite_entries("trace", "trace")) {
    if (is_hom(c) != hom) continue;
    run_logged(c, o, c["tag"]);
  }
  if (!hom) {
    int rejected = 0;
    for (std::string name : {"trace-E-a", "trace-E-b", "trace-N-a", "trace-N-b"}) {
      auto p = trace_preset(name);
      p.s = trace_s_threshold(p) - 0.1;
      try {
        make_trace_problem(p, 6);
      } catch (const precondition_error&) {
        ++rejected;
      }
    }
    o.note("validator rejected " + std::to_string(rejected) + "/4 presets with s below the threshold");
    o.require(rejected == 4, "validator rejection");
  }
  return o;
}

// ---------------------------------------------------------------- 11

Outcome trace_agreement() {
  Outcome o;
  const int J = 6;
  RychkovPair pair(2, J, 1);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    auto f = random_bandlimited(2, J, 5, trial_seed(11, t), 1.0);
    auto res = trace_function(f, pair);
    // independent restriction: read f(x', 0) straight off the grid
    double d = 0;
    for (int i = 0; i < (1 << J); ++i) d = std::max(d, std::abs(res.trace.data[i] - f.data[std::size_t(i) << J]));
    worst = std::max(worst, d);
  }
  o.note("max |Tr f - f(., 0)| over 20 functions: " + g6(worst));
  o.require(worst < 1e-6, "trace agreement");
  return o;
}

// ---------------------------------------------------------------- 12

Outcome counterexample() {
  Outcome o;
  for (auto& c : suite_entries("counterexample", "counterexample")) {
    auto rep = run_logged(c, o, "counterexample");
    double r = c.value("r", 0.5);
    o.note("  slope with the weak growth " + g6(rep.stats.at("slope_weak")) + " in [" + g6(1 / r - 1 - 0.15) + ", " +
           g6(1 / r - 1 + 0.35) + "], with the correct growth " + g6(rep.stats.at("slope_correct")) + " (|.| < 0.15)");
  }
  return o;
}

// ---------------------------------------------------------------- 13

Outcome peetre() {
  Outcome o;
  for (auto& c : suite_entries("peetre", "peetre")) {
    auto rep = run_logged(c, o, c["tag"]);
    o.note("  N = " + g6(rep.stats.at("N")) + " (threshold " + g6(rep.stats.at("threshold")) + "), min ratio " +
           g6(std::min(rep.at("ratio").by_depth[0].inf, rep.at("ratio").by_depth[1].inf)));
  }
  return o;
}

template <class Fn>
void timed(int id, const std::string& title, Fn&& fn) {
  detail::Timer t;
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  report(id, title, o, t.seconds());
}

}  // namespace

int main() {
  fs::create_directories(kOut);
  timed(1, "exact identities", exact_identities);
  timed(2, "quasi-triangle inequalities", triangle_inequalities);
  timed(3, "maximal envelope", maximal_envelope);
  timed(4, "Hardy bound", hardy);
  timed(5, "filter invariance", [] { return run_entries("filter", "filter", 0); });
  timed(6, "vector-valued maximal", maximal);
  timed(7, "atomic round trip", [] { return decomposition(false); });
  timed(8, "atom band decay", band_decay);
  timed(9, "quark round trip", quark);
  timed(10, "trace theorem", [] { return trace(false); });
  timed(11, "trace agreement", trace_agreement);
  timed(12, "counterexample slope", counterexample);
  timed(13, "Peetre characterization", peetre);
  timed(14, "homogeneous variants", [] {
    Outcome o = run_entries("filter", "filter", 1);
    for (auto part : {decomposition(true), trace(true)}) {
      o.pass = o.pass && part.pass;
      o.notes.insert(o.notes.end(), part.notes.begin(), part.notes.end());
    }
    return o;
  });
  std::printf("%s: %d of 14 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
