#pragma once

#include "io.hpp"

namespace morreykit {

/// Overrides applied to every campaign config read from JSON.
struct RunOptions {
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
};

namespace detail {

inline SpaceParams params_field(const json& cfg, int n = 1) {
  if (!cfg.contains("params")) throw domain_error("campaign config needs params");
  const json& p = cfg["params"];
  if (p.is_string()) return resolve_params(p.get<std::string>(), cfg.value("n", n));
  return params_from_json(p);
}

inline std::vector<int> int_list(const json& cfg, const char* key, std::vector<int> fallback) {
  if (!cfg.contains(key)) return fallback;
  const json& v = cfg[key];
  if (v.is_number()) return {v.get<int>()};
  return v.get<std::vector<int>>();
}

inline FieldLaw law_field(const json& cfg, FieldLaw law) {
  if (!cfg.contains("distribution")) return law;
  const json& d = cfg["distribution"];
  std::string vl = d.value("value_law", std::string("lognormal"));
  if (vl != "lognormal") throw domain_error("only the lognormal value law is available");
  law.sparsity = d.value("sparsity", law.sparsity);
  law.sigma = d.value("sigma", law.sigma);
  law.per_level = d.value("per_level", law.per_level);
  law.complex_phase = d.value("phase", law.complex_phase);
  return law;
}

inline FilterBank bank_named(const std::string& s) {
  if (s == "default") return default_bank();
  if (s == "alternate") return alternate_bank();
  throw domain_error("unknown filter bank '" + s + "'");
}

template <class C>
void common_fields(C& c, const json& cfg, const RunOptions& o) {
  c.seed = cfg.value("seed", c.seed);
  if (o.seed) c.seed = *o.seed;
  c.dry_run = o.dry_run;
}

}  // namespace detail

inline std::vector<std::string> campaign_names() {
  return {"hardy",     "maximal",  "filter",         "peetre", "multiplier", "pointwise",
          "band_sup",  "embedding", "counterexample", "trace",  "decomposition", "quark"};
}

/// Runs one campaign described by a JSON object {"name": ..., ...}. Missing
/// keys keep the config defaults.
inline Report run_campaign(const json& cfg, const RunOptions& o = {}) {
  const std::string name = cfg.at("name").get<std::string>();
  using detail::int_list;
  if (name == "hardy") {
    HardyConfig c;
    detail::common_fields(c, cfg, o);
    c.delta = json_number(cfg.value("delta", json(c.delta)));
    c.r = json_number(cfg.value("r", json(c.r)));
    c.trials = cfg.value("trials", c.trials);
    c.length = cfg.value("length", c.length);
    c.law = detail::law_field(cfg, c.law);
    return hardy_campaign(c);
  }
  if (name == "maximal") {
    MaximalConfig c;
    detail::common_fields(c, cfg, o);
    c.n = cfg.value("n", c.n);
    c.q = json_number(cfg.value("q", json(c.q)));
    c.r = json_number(cfg.value("r", json(c.r)));
    c.phi = cfg.contains("phi") ? growth_from_json(cfg["phi"], c.n) : GrowthFunction::power(4.0, c.n);
    c.resolutions = int_list(cfg, "resolutions", c.resolutions);
    c.trials = cfg.value("trials", c.trials);
    c.stack = cfg.value("stack", c.stack);
    c.cubes = cfg.value("cubes", c.cubes);
    c.cube_level = cfg.value("cube_level", c.cube_level);
    c.jobs = o.jobs;
    return maximal_campaign(c);
  }
  if (name == "filter") {
    FilterConfig c;
    detail::common_fields(c, cfg, o);
    c.params = detail::params_field(cfg);
    if (cfg.contains("bank_a")) c.bank_a = detail::bank_named(cfg["bank_a"]);
    if (cfg.contains("bank_b")) c.bank_b = detail::bank_named(cfg["bank_b"]);
    c.resolutions = int_list(cfg, "resolutions", c.resolutions);
    c.functions = cfg.value("functions", c.functions);
    c.kmax = cfg.value("kmax", c.kmax);
    c.decay = cfg.value("decay", c.decay);
    c.jobs = o.jobs;
    return filter_invariance_campaign(c);
  }
  if (name == "peetre") {
    PeetreConfig c;
    detail::common_fields(c, cfg, o);
    c.params = detail::params_field(cfg);
    c.N = cfg.value("N", c.N);
    if (cfg.contains("N_above")) c.N = peetre_threshold(c.params) + cfg["N_above"].get<double>();
    c.L = cfg.value("L", c.L);
    c.resolutions = int_list(cfg, "resolutions", c.resolutions);
    c.trials = cfg.value("trials", c.trials);
    c.kmax = cfg.value("kmax", c.kmax);
    c.decay = cfg.value("decay", c.decay);
    c.jobs = o.jobs;
    return peetre_char_campaign(c);
  }
  if (name == "multiplier") {
    MultiplierConfig c;
    detail::common_fields(c, cfg, o);
    c.params = detail::params_field(cfg);
    c.nu = cfg.value("nu", c.nu);
    if (cfg.contains("family")) c.family = parse_multiplier_family(cfg["family"]);
    c.resolutions = int_list(cfg, "resolutions", c.resolutions);
    c.trials = cfg.value("trials", c.trials);
    c.kmax = cfg.value("kmax", c.kmax);
    c.decay = cfg.value("decay", c.decay);
    c.jobs = o.jobs;
    return multiplier_campaign(c);
  }
  if (name == "pointwise") {
    PointwiseConfig c;
    detail::common_fields(c, cfg, o);
    c.params = detail::params_field(cfg);
    c.k = cfg.value("k", c.k);
    c.resolutions = int_list(cfg, "resolutions", c.resolutions);
    c.trials = cfg.value("trials", c.trials);
    c.kmax_f = cfg.value("kmax_f", c.kmax_f);
    c.kmax_g = cfg.value("kmax_g", c.kmax_g);
    c.decay = cfg.value("decay", c.decay);
    c.jobs = o.jobs;
    return pointwise_mult_campaign(c);
  }
  if (name == "band_sup") {
    BandSupConfig c;
    detail::common_fields(c, cfg, o);
    c.params = detail::params_field(cfg);
    c.resolutions = int_list(cfg, "resolutions", c.resolutions);
    c.trials = cfg.value("trials", c.trials);
    c.kmax = cfg.value("kmax", c.kmax);
    c.decay = cfg.value("decay", c.decay);
    c.jobs = o.jobs;
    return band_sup_campaign(c);
  }
  if (name == "embedding") {
    EmbeddingConfig c;
    detail::common_fields(c, cfg, o);
    c.n = cfg.value("n", c.n);
    c.p = json_number(cfg.value("p", json(c.p)));
    c.q = json_number(cfg.value("q", json(c.q)));
    c.r = json_number(cfg.value("r", json(c.r)));
    c.depths = int_list(cfg, "depths", c.depths);
    c.trials = cfg.value("trials", c.trials);
    c.law = detail::law_field(cfg, c.law);
    c.jobs = o.jobs;
    return embedding_campaign(c);
  }
  if (name == "counterexample") {
    CounterexampleConfig c;
    c.dry_run = o.dry_run;
    c.n = cfg.value("n", c.n);
    c.p = json_number(cfg.value("p", json(c.p)));
    c.q = json_number(cfg.value("q", json(c.q)));
    c.r = json_number(cfg.value("r", json(c.r)));
    c.N_lo = cfg.value("N_lo", c.N_lo);
    c.N_hi = cfg.value("N_hi", c.N_hi);
    return counterexample_growth(c);
  }
  if (name == "trace") {
    TraceCampaignConfig c;
    detail::common_fields(c, cfg, o);
    c.params = detail::params_field(cfg, 2);
    c.depths = int_list(cfg, cfg.contains("depths") ? "depths" : "depth", c.depths);
    c.trials = cfg.value("trials", c.trials);
    c.law = detail::law_field(cfg, c.law);
    c.jobs = o.jobs;
    return trace_campaign(c);
  }
  if (name == "decomposition") {
    DecompositionConfig c;
    detail::common_fields(c, cfg, o);
    c.params = detail::params_field(cfg);
    c.K = cfg.value("K", c.K);
    c.L = cfg.value("L", c.L);
    c.resolutions = int_list(cfg, "resolutions", c.resolutions);
    c.functions = cfg.value("functions", c.functions);
    c.kmax = cfg.value("kmax", c.kmax);
    c.decay = cfg.value("decay", c.decay);
    c.jobs = o.jobs;
    return decomposition_campaign(c);
  }
  if (name == "quark") {
    QuarkCampaignConfig c;
    detail::common_fields(c, cfg, o);
    c.params = detail::params_field(cfg);
    c.resolutions = int_list(cfg, "resolutions", c.resolutions);
    c.functions = cfg.value("functions", c.functions);
    c.kmax = cfg.value("kmax", c.kmax);
    c.beta_cutoff = cfg.value("beta_cutoff", c.beta_cutoff);
    c.jobs = o.jobs;
    return quark_campaign(c);
  }
  throw domain_error("unknown campaign '" + name + "'");
}

/// File stem for a campaign's outputs: name plus an optional "tag".
inline std::string campaign_stem(const json& cfg, std::size_t index) {
  std::string stem = cfg.value("tag", cfg.at("name").get<std::string>());
  if (index != std::size_t(-1)) stem = (index < 10 ? "0" : "") + std::to_string(index) + "_" + stem;
  return stem;
}

/// Writes <stem>.csv, <stem>.witness.json and returns the summary record.
inline json write_campaign_outputs(const fs::path& dir, const std::string& stem, const Report& rep, const json& cfg) {
  fs::create_directories(dir);
  {
    auto os = detail::open_out(dir / (stem + ".csv"));
    write_report_csv(os, rep);
  }
  fs::path wp = dir / (stem + ".witness.json");
  {
    auto os = detail::open_out(wp);
    os << witness_json(rep, cfg).dump(1) << '\n';
  }
  json s = summary_json(rep, wp.filename().string());
  if (cfg.contains("tag")) s["tag"] = cfg["tag"];
  return s;
}

/// The acceptance-scale campaign list (what `suite --file` expects).
inline json acceptance_suite() {
  json s = json::array();
  for (double d : {0.25, 0.5, 1.0})
    for (std::string r : {"0.5", "1", "2", "inf"})
      s.push_back({{"name", "hardy"}, {"tag", "hardy_d" + fmt_double(d) + "_r" + r}, {"delta", d}, {"r", r == "inf" ? json("inf") : json(std::stod(r))}});
  auto filt = [&](const std::string& preset, int n, std::vector<int> res, int kmax) {
    s.push_back({{"name", "filter"}, {"tag", "filter_" + preset + "_n" + std::to_string(n)}, {"params", preset}, {"n", n},
                 {"resolutions", res}, {"functions", 100}, {"kmax", kmax}});
  };
  for (std::string base : {"power-p3-q1.5-s0.5-E-r2", "power-p3-q1.5-s0.5-E-rinf", "power-p3-q1.5-s0.5-N-r2",
                           "power-p3-q1.5-s0.5-N-rinf"}) {
    filt(base, 1, {7, 8}, 12);
    filt(base, 2, {6, 7}, 8);
    filt(base + "-hom", 1, {7, 8}, 12);
    filt(base + "-hom", 2, {6, 7}, 8);
  }
  s.push_back({{"name", "maximal"}, {"tag", "maximal_power4"}, {"q", 2}, {"r", 2}, {"phi", {{"family", "power"}, {"p", 4}}}});
  s.push_back({{"name", "maximal"},
               {"tag", "maximal_powerlog"},
               {"q", 2},
               {"r", 2},
               {"phi", {{"family", "powerlog"}, {"p", 4}, {"exponent", 1}}}});
  for (std::string pr : {"power-p4-q2-s0.5-E-r2", "power-p4-q2-s0.5-E-r2-hom"})
    s.push_back({{"name", "decomposition"}, {"tag", "decomposition_" + pr}, {"params", pr}, {"functions", 50}});
  s.push_back({{"name", "quark"}, {"params", "power-p4-q2-s0.5-E-r2"}});
  for (std::string pr : {"trace-E-a", "trace-E-b", "trace-N-a", "trace-N-b"}) {
    s.push_back({{"name", "trace"}, {"tag", "trace_" + pr}, {"params", pr}, {"depths", {6, 8}}, {"trials", 200}});
    s.push_back({{"name", "trace"}, {"tag", "trace_" + pr + "-hom"}, {"params", pr + "-hom"}, {"depths", {6, 8}}, {"trials", 200}});
  }
  s.push_back({{"name", "counterexample"}});
  for (std::string v : {"N", "E"})
    for (double above : {0.25, 4.0})
      s.push_back({{"name", "peetre"},
                   {"tag", std::string("peetre_") + v + (above < 1 ? "_near" : "_far")},
                   {"params", "power-p4-q1.5-s0.5-" + v + "-r0.8"},
                   {"N_above", above}});
  return s;
}

}  // namespace morreykit
