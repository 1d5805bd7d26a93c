#pragma once

#include <json.hpp>
#include <regex>

#include "trace.hpp"

namespace morreykit {

using json = nlohmann::json;

// ---------------------------------------------------------------- growth functions

inline json to_json(const GrowthFunction& g) {
  json j;
  j["family"] = family_name(g.family());
  switch (g.family()) {
    case Family::Power:
      if (std::isinf(g.p()))
        j["p"] = "inf";
      else
        j["p"] = g.p();
      break;
    case Family::PowerLog:
      j["p"] = g.p();
      j["exponent"] = g.exponent();
      break;
    case Family::LogInv: j["exponent"] = g.exponent(); break;
    case Family::Table: {
      json e = json::array();
      for (auto& [k, v] : g.entries()) e.push_back({k, v});
      j["entries"] = e;
      break;
    }
  }
  if (g.power_u() != 1.0) j["power"] = g.power_u();
  if (g.shift() != 0.0) j["shift"] = g.shift();
  j["n"] = g.dim();
  return j;
}

inline double json_number(const json& v) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    throw domain_error("expected a number, got '" + s + "'");
  }
  return v.get<double>();
}

inline GrowthFunction growth_from_json(const json& j, int n) {
  if (!j.contains("family")) throw domain_error("growth function JSON needs a family");
  const std::string fam = j.at("family").get<std::string>();
  const int dim = j.value("n", n);
  GrowthFunction g;
  if (fam == "power")
    g = GrowthFunction::power(json_number(j.at("p")), dim);
  else if (fam == "powerlog")
    g = GrowthFunction::power_log(json_number(j.at("p")), json_number(j.at("exponent")), dim);
  else if (fam == "loginv")
    g = GrowthFunction::log_inv(json_number(j.at("exponent")), dim);
  else if (fam == "table") {
    std::map<int, double> e;
    for (auto& row : j.at("entries")) e[row.at(0).get<int>()] = row.at(1).get<double>();
    g = GrowthFunction::table(std::move(e), dim);
  } else {
    throw domain_error("unknown growth family '" + fam + "'");
  }
  if (j.contains("power")) g = g.raised(json_number(j["power"]));
  if (j.contains("shift")) g = g.times_power(json_number(j["shift"]));
  return g;
}

// ---------------------------------------------------------------- space parameters

inline json to_json(const SpaceParams& p) {
  json j;
  j["q"] = p.q;
  if (std::isinf(p.r))
    j["r"] = "inf";
  else
    j["r"] = p.r;
  j["s"] = p.s;
  j["phi"] = to_json(p.phi);
  j["variant"] = variant_name(p.variant);
  j["homogeneous"] = p.homogeneous;
  j["n"] = p.n;
  j["hom_floor"] = p.hom_floor;
  return j;
}

inline SpaceParams params_from_json(const json& j) {
  SpaceParams p;
  p.n = j.value("n", 1);
  p.q = json_number(j.at("q"));
  p.r = j.contains("r") ? json_number(j["r"]) : 2.0;
  p.s = j.contains("s") ? json_number(j["s"]) : 0.0;
  std::string v = j.value("variant", std::string("E"));
  if (v == "N")
    p.variant = Variant::N;
  else if (v == "E")
    p.variant = Variant::E;
  else
    throw domain_error("variant must be N or E");
  p.homogeneous = j.value("homogeneous", false);
  p.hom_floor = j.value("hom_floor", -4);
  p.phi = j.contains("phi") ? growth_from_json(j["phi"], p.n) : GrowthFunction::power(p.q, p.n);
  return p;
}

/// Checks run before any computation: parameter ranges, phi in G_q, and the
/// Nakai condition where the E-variant needs it. Returns the failures.
inline std::vector<std::string> validate_params(const SpaceParams& p) {
  std::vector<std::string> bad;
  if (!(p.q > 0)) bad.push_back("q must be positive");
  if (!(p.r > 0)) bad.push_back("r must be positive");
  if (p.n < 1 || p.n > 3) bad.push_back("n must be 1, 2 or 3");
  if (p.phi.dim() != p.n) bad.push_back("phi dimension differs from n");
  if (!bad.empty()) return bad;
  auto scales = scales_for(p.phi);
  if (!is_in_Gq(p.phi, p.q, scales)) bad.push_back("phi is not in G_q");
  if (p.variant == Variant::E && !std::isinf(p.r) && !check_nakai(p.phi, scales).ok)
    bad.push_back("E-variant with finite r needs the Nakai condition");
  return bad;
}

/// Named parameter regimes. Generic names follow
///   <family>-p<P>-q<Q>-s<S>-<N|E>-r<R>[-hom]   e.g. power-p2-q1-s0-E-r2
/// with family power or powerlog (log exponent 1); r may be "inf".
/// Trace presets (n = 2) satisfy the trace hypotheses:
///   trace-E-a, trace-E-b, trace-N-a, trace-N-b.
inline std::vector<std::string> preset_names() {
  return {"trace-E-a", "trace-E-b", "trace-N-a", "trace-N-b", "power-p2-q1-s0-E-r2", "power-p4-q2-s0.5-E-r2"};
}

inline SpaceParams trace_preset(const std::string& name) {
  SpaceParams p;
  p.n = 2;
  if (name == "trace-E-a") {
    p.q = 2;
    p.r = 2;
    p.s = 1;
    p.phi = GrowthFunction::power(3, 2);
    p.variant = Variant::E;
  } else if (name == "trace-E-b") {
    p.q = 1;
    p.r = 0.5;
    p.s = 2.5;
    p.phi = GrowthFunction::power(1.5, 2);
    p.variant = Variant::E;
  } else if (name == "trace-N-a") {
    p.q = 2;
    p.r = 3;
    p.s = 1;
    p.phi = GrowthFunction::power(3, 2);
    p.variant = Variant::N;
  } else if (name == "trace-N-b") {
    p.q = 0.5;
    p.r = 1;
    p.s = 3.5;
    p.phi = GrowthFunction::power(0.8, 2);
    p.variant = Variant::N;
  } else {
    throw domain_error("unknown trace preset '" + name + "'");
  }
  return p;
}

inline SpaceParams parse_preset(const std::string& name, int n = 1) {
  std::string base = name;
  bool hom = false;
  if (base.size() > 4 && base.substr(base.size() - 4) == "-hom") {
    hom = true;
    base = base.substr(0, base.size() - 4);
  }
  SpaceParams p;
  if (base.rfind("trace-", 0) == 0) {
    p = trace_preset(base);
  } else {
    static const std::regex re(R"(^(power|powerlog)-p([0-9.]+|inf)-q([0-9.]+)-s(-?[0-9.]+)-(N|E)-r([0-9.]+|inf)$)");
    std::smatch m;
    if (!std::regex_match(base, m, re)) throw domain_error("unknown params preset '" + name + "'");
    auto num = [](const std::string& s) { return s == "inf" ? kInf : std::stod(s); };
    p.n = n;
    double P = num(m[2]);
    p.phi = m[1] == "power" ? GrowthFunction::power(P, n) : GrowthFunction::power_log(P, 1.0, n);
    p.q = num(m[3]);
    p.s = num(m[4]);
    p.variant = m[5] == "N" ? Variant::N : Variant::E;
    p.r = num(m[6]);
  }
  p.homogeneous = hom;
  return p;
}

/// A preset name or an inline JSON object.
inline SpaceParams resolve_params(const std::string& spec, int n = 1) {
  if (!spec.empty() && spec.front() == '{') return params_from_json(json::parse(spec));
  return parse_preset(spec, n);
}

}  // namespace morreykit
