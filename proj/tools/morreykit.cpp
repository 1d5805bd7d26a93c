#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include <morreykit/morreykit.hpp>

using namespace morreykit;

namespace {

struct Common {
  int jobs = 1;
  std::uint64_t seed = 1;
  bool seed_given = false;
  bool dry_run = false;
};

/// MORREYKIT_SEED beats --seed beats the config file.
std::optional<std::uint64_t> effective_seed(const Common& c) {
  if (const char* env = std::getenv("MORREYKIT_SEED"); env && *env) return std::stoull(env);
  if (c.seed_given) return c.seed;
  return std::nullopt;
}

int log2_of(int G) {
  int J = 0;
  while ((1 << J) < G) ++J;
  if ((1 << J) != G) throw domain_error("--res must be a power of two");
  return J;
}

struct FunctionSource {
  std::string fn, input;
  int res = 256;
  int n = 0;  // 0: take from params
};

GridFunction load_function(const FunctionSource& s, int n, std::uint64_t seed) {
  if (!s.input.empty()) return load_grid(s.input);
  if (s.fn.empty()) throw domain_error("give --fn or --input");
  return preset_function(s.fn, n, log2_of(s.res), seed);
}

void add_function_source(CLI::App* app, FunctionSource& s) {
  app->add_option("--fn", s.fn, "synthetic function: gaussian, mode, chirp, random");
  app->add_option("--input", s.input, "grid function file (.json or binary)");
  app->add_option("--res", s.res, "grid points per axis (power of two)");
}

void print_checks(const std::vector<std::string>& checked, const std::vector<std::string>& failed) {
  json j = {{"dry_run", true}, {"checked", checked}, {"failed", failed}, {"ok", failed.empty()}};
  std::cout << j.dump(2) << '\n';
}

/// Parameter checks shared by every norm-type command.
std::vector<std::string> param_checks(const SpaceParams& p) {
  std::vector<std::string> c = {"q > 0", "r > 0", "n in {1,2,3}", "phi in G_q"};
  if (p.variant == Variant::E && !std::isinf(p.r)) c.push_back("Nakai condition");
  return c;
}

SpaceParams checked_params(const std::string& spec, int n) {
  auto p = resolve_params(spec, n);
  auto bad = validate_params(p);
  if (!bad.empty()) {
    std::string msg = "invalid params:";
    for (auto& b : bad) msg += " " + b + ";";
    throw precondition_error(msg);
  }
  return p;
}

int write_json_out(const json& j, const std::string& out) {
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else {
    std::ofstream os(out);
    if (!os) throw domain_error("cannot write " + out);
    os << j.dump(2) << '\n';
  }
  return 0;
}

json bound_json(const TraceBound& b) {
  return {{"constant", b.zero_denominator ? json(nullptr) : json(b.value)},
          {"lhs", b.lhs},
          {"rhs", b.rhs},
          {"witness", cube_literal(b.witness)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"morreykit: generalized Besov-Morrey and Triebel-Lizorkin-Morrey norms on the torus"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", common.seed, "master seed (MORREYKIT_SEED overrides)");
  app.add_flag("--dry-run", common.dry_run, "check preconditions and stop");

  // norm
  FunctionSource nsrc;
  std::string nparams = "power-p2-q1-s0-E-r2", nkind = "space", nbank = "default", nout;
  int ndim = 1;
  auto* norm = app.add_subcommand("norm", "norm of a grid function");
  add_function_source(norm, nsrc);
  norm->add_option("--params", nparams, "preset name or inline JSON");
  norm->add_option("--n", ndim, "dimension for synthetic functions");
  norm->add_option("--kind", nkind, "space or morrey")->check(CLI::IsMember({"space", "morrey"}));
  norm->add_option("--bank", nbank, "filter bank: default or alternate");
  norm->add_option("--output", nout, "write the JSON here instead of stdout");

  // seqnorm
  std::string sin, sparams = "power-p2-q1-s0-E-r2", sout;
  int sdepth = 6, sdim = 1;
  auto* seqnorm = app.add_subcommand("seqnorm", "sequence norm of a coefficient field");
  seqnorm->add_option("--input", sin, "coefficient CSV; omitted: a random field");
  seqnorm->add_option("--params", sparams, "preset name or inline JSON");
  seqnorm->add_option("--depth", sdepth, "depth of the random field");
  seqnorm->add_option("--n", sdim, "dimension of the random field");
  seqnorm->add_option("--output", sout, "write the JSON here instead of stdout");

  // decompose
  FunctionSource dsrc;
  std::string dparams = "power-p2-q1-s0-E-r2", dout;
  int dK = 1, dL = 1, ddim = 1;
  auto* decompose = app.add_subcommand("decompose", "atomic decomposition and round trip");
  add_function_source(decompose, dsrc);
  decompose->add_option("--params", dparams, "preset name or inline JSON");
  decompose->add_option("--n", ddim, "dimension for synthetic functions");
  decompose->add_option("--K", dK, "smoothness order of the atoms");
  decompose->add_option("--L", dL, "moment order of the reproducing pair");
  decompose->add_option("--output", dout, "atom dictionary directory (coefficients in lambda.csv)");

  // quark
  FunctionSource qsrc;
  std::string qparams = "power-p2-q1-s0-E-r2", qout;
  int qbeta = 8, qdim = 1;
  auto* quark = app.add_subcommand("quark", "quark decomposition and round trip");
  add_function_source(quark, qsrc);
  quark->add_option("--params", qparams, "preset name or inline JSON");
  quark->add_option("--n", qdim, "dimension for synthetic functions");
  quark->add_option("--beta-cutoff", qbeta, "largest |beta|");
  quark->add_option("--output", qout, "quark coefficient CSV");

  // trace
  FunctionSource tsrc;
  std::string tin, tparams = "trace-E-a", tout;
  int tdepth = 6;
  auto* trace = app.add_subcommand("trace", "trace of a coefficient field or of a function");
  add_function_source(trace, tsrc);
  trace->add_option("--coeffs", tin, "coefficient CSV (dimension n); omitted: function mode");
  trace->add_option("--params", tparams, "trace-admissible preset or inline JSON");
  trace->add_option("--depth", tdepth, "finest level used in the bounds");
  trace->add_option("--output", tout, "trace output (coefficient CSV or grid file)");

  // extend
  std::string ein, eparams = "trace-E-a", eout;
  int edepth = 6;
  auto* extend = app.add_subcommand("extend", "extension of a hyperplane coefficient field");
  extend->add_option("--coeffs", ein, "coefficient CSV in dimension n-1")->required();
  extend->add_option("--params", eparams, "trace-admissible preset or inline JSON");
  extend->add_option("--depth", edepth, "finest level used in the bounds");
  extend->add_option("--output", eout, "extended coefficient CSV");

  // campaign
  json flags = json::object();
  std::string cname, cconfig, cout_dir = "campaign_out";
  auto* campaign = app.add_subcommand("campaign", "run one empirical campaign");
  campaign->add_option("--name", cname, "campaign name")->check(CLI::IsMember(campaign_names()));
  campaign->add_option("--config", cconfig, "JSON file or inline JSON object");
  campaign->add_option("--out", cout_dir, "output directory");
  std::map<std::string, std::string> kv;
  for (const char* key : {"delta", "r", "q", "p", "trials", "params", "functions", "N", "nu", "k", "K", "L", "n", "depth"})
    campaign->add_option(std::string("--") + key, kv[key], std::string("config key ") + key);

  // suite
  std::string ufile, uout = "suite_out";
  bool ubuiltin = false;
  std::string uemit;
  auto* suite = app.add_subcommand("suite", "run a list of campaigns");
  suite->add_option("--file", ufile, "JSON list of campaign configs");
  suite->add_flag("--acceptance", ubuiltin, "use the built-in acceptance list");
  suite->add_option("--emit", uemit, "write the built-in list to this file and exit");
  suite->add_option("--out", uout, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  common.seed_given = seed_opt->count() > 0;
  const auto seed = effective_seed(common);
  const std::uint64_t fseed = seed.value_or(1);

  try {
    if (*norm) {
      int n = nsrc.input.empty() ? ndim : 0;
      auto p = resolve_params(nparams, n ? n : 1);
      auto bad = validate_params(p);
      if (common.dry_run) return print_checks(param_checks(p), bad), bad.empty() ? 0 : 1;
      p = checked_params(nparams, n ? n : 1);
      auto f = load_function(nsrc, p.n, fseed);
      if (f.n != p.n) {
        json pj = to_json(p);
        pj["n"] = f.n;
        pj["phi"]["n"] = f.n;
        p = params_from_json(pj);
      }
      NormResult r;
      if (nkind == "morrey")
        r.value = morrey_norm(f, p.q, p.phi, p.min_level());
      else
        r = space_norm(f, p, detail::bank_named(nbank));
      return write_json_out(norm_json(nkind == "morrey" ? "morrey" : std::string("space-") + variant_name(p.variant), p, r), nout);
    }

    if (*seqnorm) {
      auto p = resolve_params(sparams, sdim);
      auto bad = validate_params(p);
      if (common.dry_run) return print_checks(param_checks(p), bad), bad.empty() ? 0 : 1;
      p = checked_params(sparams, sdim);
      CoeffField lam = sin.empty() ? random_field(p.n, p.homogeneous ? p.min_level() : 0, sdepth, FieldLaw{}, fseed,
                                                  level_normalizer(p))
                                   : load_coeff(sin);
      return write_json_out(norm_json(std::string("sequence-") + variant_name(p.variant), p, seq_norm(lam, p)), sout);
    }

    if (*decompose) {
      auto p = resolve_params(dparams, ddim);
      auto bad = validate_params(p);
      std::vector<std::string> checked = param_checks(p);
      checked.push_back("L >= 0");
      if (dL < 0) bad.push_back("L must be >= 0");
      if (common.dry_run) return print_checks(checked, bad), bad.empty() ? 0 : 1;
      p = checked_params(dparams, ddim);
      auto f = load_function(dsrc, p.n, fseed);
      RychkovPair pair(f.n, f.J, dL, p.homogeneous, p.hom_floor);
      auto dec = atomic_analyze(f, pair, dK, common.jobs);
      auto g = synthesize(dec);
      GridFunction diff = f - g;
      if (p.homogeneous) {
        cplx m = diff.integral();
        for (auto& v : diff.data) v -= m;
      }
      json j = {{"atoms", dec.atoms.size()},
                {"residual_l2", diff.l2()},
                {"relative_residual", diff.l2() / std::max(f.l2(), 1e-300)}};
      if (f.n == p.n) j["sequence_norm"] = seq_norm(dec.lambda, p).value;
      if (!dout.empty()) {
        save_atoms(dout, dec);
        save_coeff(fs::path(dout) / "lambda.csv", dec.lambda);
        j["output"] = dout;
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*quark) {
      auto p = resolve_params(qparams, qdim);
      auto bad = validate_params(p);
      std::vector<std::string> checked = param_checks(p);
      checked.push_back("rho > R");
      if (qbeta < 0) bad.push_back("beta cutoff must be >= 0");
      if (common.dry_run) return print_checks(checked, bad), bad.empty() ? 0 : 1;
      p = checked_params(qparams, qdim);
      auto f = load_function(qsrc, p.n, fseed);
      QuarkGen gen(f.n);
      auto qa = quark_analyze(f, gen, default_bank(), qbeta, p.homogeneous);
      json res = json::array();
      for (int b = 0; b <= qbeta; ++b) res.push_back(quark_residual(f, truncate_beta(qa.coeffs, b), p.homogeneous));
      json j = {{"beta_cutoff", qbeta}, {"residual_by_cutoff", res}, {"rho", gen.rho}, {"R", gen.R}};
      if (f.n == p.n) j["coefficient_constant"] = quark_coefficient_constant(qa, p);
      if (!qout.empty()) {
        auto os = detail::open_out(qout);
        write_quark_csv(os, qa.coeffs);
        j["output"] = qout;
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*trace) {
      auto p = resolve_params(tparams, 2);
      auto tv = validate_trace(p);
      std::vector<std::string> checked = {"n >= 2", "s > " + fmt_double(tv.s_threshold), "phi in G_q", "phi* increasing",
                                          "phi* summable"};
      if (common.dry_run) return print_checks(checked, tv.messages), tv.ok() ? 0 : 1;
      auto tp = make_trace_problem(p, tdepth, fseed);
      if (!tin.empty()) {
        auto lam = load_coeff(tin);
        if (lam.n != p.n) throw domain_error("coefficient dimension differs from params");
        auto lp = trace_coeff(lam).first;
        json j = {{"bound_I", bound_json(trace_bound_I(lam, tp))}, {"bound_II", bound_json(trace_bound_II(lam, tp))}};
        if (!tout.empty()) {
          save_coeff(tout, lp);
          j["output"] = tout;
        }
        std::cout << j.dump(2) << '\n';
        return 0;
      }
      auto f = load_function(tsrc, p.n, fseed);
      RychkovPair pair(f.n, f.J, 1, false);
      auto tr = trace_function(f, pair, 1, common.jobs);
      json j = {{"max_diff", tr.max_diff}};
      if (!tout.empty()) {
        save_grid(tout, tr.trace);
        j["output"] = tout;
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    if (*extend) {
      auto p = resolve_params(eparams, 2);
      auto tv = validate_trace(p);
      std::vector<std::string> checked = {"n >= 2", "s > " + fmt_double(tv.s_threshold), "phi in G_q", "phi* increasing",
                                          "phi* summable"};
      if (common.dry_run) return print_checks(checked, tv.messages), tv.ok() ? 0 : 1;
      auto tp = make_trace_problem(p, edepth, fseed);
      auto lp = load_coeff(ein);
      if (lp.n != p.n - 1) throw domain_error("hyperplane coefficients must have dimension n-1");
      auto eb = extension_bound(lp, tp);
      json j = {{"bound", bound_json(eb.total)}, {"G_part", eb.G_part}, {"nonG_part", eb.nonG_part}};
      if (!eout.empty()) {
        save_coeff(eout, extend_coeff(lp));
        j["output"] = eout;
      }
      std::cout << j.dump(2) << '\n';
      return 0;
    }

    RunOptions ro{common.jobs, seed, common.dry_run};

    if (*campaign) {
      json cfg = json::object();
      if (!cconfig.empty()) {
        if (cconfig.front() == '{')
          cfg = json::parse(cconfig);
        else {
          auto is = detail::open_in(cconfig);
          cfg = json::parse(is);
        }
      }
      if (!cname.empty()) cfg["name"] = cname;
      if (!cfg.contains("name")) throw domain_error("campaign needs --name or a config with a name");
      for (auto& [k, v] : kv) {
        if (v.empty()) continue;
        if (k == "params" || v == "inf")
          cfg[k] = v;
        else
          cfg[k] = json::parse(v);
      }
      Report rep = run_campaign(cfg, ro);
      if (common.dry_run) return print_checks(rep.checks, {}), 0;
      json s = write_campaign_outputs(cout_dir, campaign_stem(cfg, std::size_t(-1)), rep, cfg);
      {
        auto os = detail::open_out(fs::path(cout_dir) / (campaign_stem(cfg, std::size_t(-1)) + ".summary.json"));
        os << s.dump(2) << '\n';
      }
      std::cout << s.dump(2) << '\n';
      return rep.status();
    }

    if (*suite) {
      if (!uemit.empty()) {
        auto os = detail::open_out(uemit);
        os << acceptance_suite().dump(2) << '\n';
        return 0;
      }
      json list;
      if (ubuiltin)
        list = acceptance_suite();
      else if (!ufile.empty()) {
        auto is = detail::open_in(ufile);
        list = json::parse(is);
      } else {
        throw domain_error("suite needs --file or --acceptance");
      }
      if (!list.is_array()) throw domain_error("suite file must hold a JSON list");
      json summary = json::array();
      int worst = 0;
      for (std::size_t i = 0; i < list.size(); ++i) {
        Report rep = run_campaign(list[i], ro);
        if (common.dry_run) {
          summary.push_back({{"campaign", rep.name}, {"checked", rep.checks}});
          continue;
        }
        summary.push_back(write_campaign_outputs(uout, campaign_stem(list[i], i), rep, list[i]));
        std::cerr << campaign_stem(list[i], i) << ": " << (rep.pass() ? "pass" : "FAIL") << '\n';
        worst = std::max(worst, rep.status());
      }
      if (!common.dry_run) {
        auto os = detail::open_out(fs::path(uout) / "summary.json");
        os << summary.dump(2) << '\n';
      }
      std::cout << summary.dump(2) << '\n';
      return worst;
    }
  } catch (const precondition_error& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
