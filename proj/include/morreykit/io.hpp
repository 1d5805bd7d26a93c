#pragma once

#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>

#include "atoms.hpp"
#include "campaigns.hpp"
#include "params.hpp"

namespace morreykit {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- grid functions
//
// Binary layout (little endian):
//   "MKGF"  u32 n  u32 G  "c128"  then G^n pairs of f64 (re, im), row-major,
//   last axis fastest.

namespace detail {
inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}
inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw domain_error("truncated grid file");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t(b[3]) << 24);
}
inline int exact_log2(std::uint32_t G) {
  int J = 0;
  while ((1u << J) < G) ++J;
  if ((1u << J) != G) throw domain_error("grid size must be a power of two");
  return J;
}
inline std::ofstream open_out(const fs::path& p, bool binary = false) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, binary ? std::ios::binary : std::ios::out);
  if (!os) throw domain_error("cannot write " + p.string());
  return os;
}
inline std::ifstream open_in(const fs::path& p, bool binary = false) {
  std::ifstream is(p, binary ? std::ios::binary : std::ios::in);
  if (!is) throw domain_error("cannot read " + p.string());
  return is;
}
}  // namespace detail

inline void write_grid(std::ostream& os, const GridFunction& f) {
  os.write("MKGF", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(f.n));
  detail::put_u32(os, static_cast<std::uint32_t>(f.G()));
  os.write("c128", 4);
  static_assert(sizeof(cplx) == 16);
  os.write(reinterpret_cast<const char*>(f.data.data()), static_cast<std::streamsize>(f.size() * sizeof(cplx)));
}

inline GridFunction read_grid(std::istream& is) {
  char tag[4];
  if (!is.read(tag, 4) || std::memcmp(tag, "MKGF", 4) != 0) throw domain_error("not a grid function file");
  int n = static_cast<int>(detail::get_u32(is));
  int J = detail::exact_log2(detail::get_u32(is));
  if (!is.read(tag, 4) || std::memcmp(tag, "c128", 4) != 0) throw domain_error("unsupported sample type");
  GridFunction f(n, J);
  if (!is.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(f.size() * sizeof(cplx))))
    throw domain_error("truncated grid file");
  return f;
}

inline json grid_to_json(const GridFunction& f) {
  json re = json::array(), im = json::array();
  for (auto& v : f.data) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return {{"n", f.n}, {"G", f.G()}, {"re", re}, {"im", im}};
}

inline GridFunction grid_from_json(const json& j) {
  GridFunction f(j.at("n").get<int>(), detail::exact_log2(j.at("G").get<std::uint32_t>()));
  auto& re = j.at("re");
  if (re.size() != f.size()) throw domain_error("grid JSON has the wrong number of samples");
  const json* im = j.contains("im") ? &j["im"] : nullptr;
  for (std::size_t i = 0; i < f.size(); ++i) f.data[i] = {re[i].get<double>(), im ? (*im)[i].get<double>() : 0.0};
  return f;
}

/// Files ending in .json use the JSON form, everything else the binary one.
inline void save_grid(const fs::path& p, const GridFunction& f) {
  if (p.extension() == ".json") {
    auto os = detail::open_out(p);
    os << grid_to_json(f).dump() << '\n';
    return;
  }
  auto os = detail::open_out(p, true);
  write_grid(os, f);
}

inline GridFunction load_grid(const fs::path& p) {
  if (p.extension() == ".json") {
    auto is = detail::open_in(p);
    return grid_from_json(json::parse(is));
  }
  auto is = detail::open_in(p, true);
  return read_grid(is);
}

// ---------------------------------------------------------------- coefficient fields

namespace detail {
inline Index unflatten(std::size_t flat, int j, int n) {
  Index m(n, 0);
  if (j <= 0) return m;
  const std::size_t mask = (std::size_t(1) << j) - 1;
  for (int k = n - 1; k >= 0; --k) {
    m[k] = static_cast<std::int64_t>(flat & mask);
    flat >>= j;
  }
  return m;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t k = 0;
  while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
  return s.substr(k);
}

inline double parse_double(const std::string& s) {
  std::string t = trim(s);
  if (t == "inf") return kInf;
  if (t == "-inf") return -kInf;
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double v = std::stod(t, &used);
  if (used != t.size()) throw domain_error("bad number '" + t + "'");
  return v;
}
}  // namespace detail

/// Header "j,m1,..,mn,re,im". Only nonzero entries are written unless
/// `dense`; the level range is then taken from the rows on reading.
inline void write_coeff_csv(std::ostream& os, const CoeffField& lam, bool dense = false) {
  os << 'j';
  for (int k = 1; k <= lam.n; ++k) os << ",m" << k;
  os << ",re,im\n";
  for (int j = lam.jmin; j <= lam.jmax; ++j) {
    auto& l = lam.level(j);
    for (std::size_t f = 0; f < l.size(); ++f) {
      if (!dense && l[f] == 0.0) continue;
      os << j;
      for (auto v : detail::unflatten(f, j, lam.n)) os << ',' << v;
      os << ',' << fmt_double(l[f].real()) << ',' << fmt_double(l[f].imag()) << '\n';
    }
  }
}

/// Levels missing from the file (or outside [jmin, jmax] hints) stay zero.
inline CoeffField read_coeff_csv(std::istream& is, std::optional<std::pair<int, int>> range = {}) {
  std::string line;
  if (!std::getline(is, line)) throw domain_error("empty coefficient CSV");
  auto head = detail::split(detail::trim(line), ',');
  const int n = static_cast<int>(head.size()) - 3;
  if (n < 1 || detail::trim(head[0]) != "j" || detail::trim(head[n + 1]) != "re" || detail::trim(head[n + 2]) != "im")
    throw domain_error("coefficient CSV header must be j,m1..mn,re,im");
  struct Row {
    int j;
    Index m;
    cplx v;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line, ',');
    if (static_cast<int>(cells.size()) != n + 3) throw domain_error("coefficient CSV row has the wrong width");
    Row r;
    r.j = std::stoi(cells[0]);
    for (int k = 0; k < n; ++k) r.m.push_back(std::stoll(cells[1 + k]));
    r.v = {detail::parse_double(cells[n + 1]), detail::parse_double(cells[n + 2])};
    rows.push_back(std::move(r));
  }
  int lo = range ? range->first : std::numeric_limits<int>::max();
  int hi = range ? range->second : std::numeric_limits<int>::min();
  if (!range)
    for (auto& r : rows) lo = std::min(lo, r.j), hi = std::max(hi, r.j);
  if (lo > hi) throw domain_error("coefficient CSV has no rows and no level range");
  CoeffField lam(n, lo, hi);
  for (auto& r : rows) {
    if (!lam.has(r.j)) throw domain_error("coefficient row outside the level range");
    lam.at(DyadicCube{r.j, r.m}) = r.v;
  }
  return lam;
}

inline void save_coeff(const fs::path& p, const CoeffField& lam, bool dense = false) {
  auto os = detail::open_out(p);
  write_coeff_csv(os, lam, dense);
}

inline CoeffField load_coeff(const fs::path& p, std::optional<std::pair<int, int>> range = {}) {
  auto is = detail::open_in(p);
  return read_coeff_csv(is, range);
}

/// "beta,nu,m1..mn,re,im", beta dash-joined (e.g. 1-0). nu is the band
/// index; the stored level is nu + rho.
inline void write_quark_csv(std::ostream& os, const QuarkCoeffs& q) {
  const int rho = static_cast<int>(std::lround(q.rho));
  os << "beta,nu";
  for (int k = 1; k <= q.n; ++k) os << ",m" << k;
  os << ",re,im\n";
  for (auto& [beta, field] : q.values) {
    std::string b;
    for (std::size_t k = 0; k < beta.size(); ++k) b += (k ? "-" : "") + std::to_string(beta[k]);
    for (int j = field.jmin; j <= field.jmax; ++j) {
      auto& l = field.level(j);
      for (std::size_t f = 0; f < l.size(); ++f) {
        if (l[f] == 0.0) continue;
        os << b << ',' << j - rho;
        for (auto v : detail::unflatten(f, j, q.n)) os << ',' << v;
        os << ',' << fmt_double(l[f].real()) << ',' << fmt_double(l[f].imag()) << '\n';
      }
    }
  }
}

/// Each beta gets levels [jmin, jmax] (pass the analysis range); beta values
/// up to beta_cutoff absent from the file are created as zero fields.
inline QuarkCoeffs read_quark_csv(std::istream& is, int beta_cutoff, double rho, int jmin, int jmax) {
  std::string line;
  if (!std::getline(is, line)) throw domain_error("empty quark CSV");
  auto head = detail::split(detail::trim(line), ',');
  const int n = static_cast<int>(head.size()) - 4;
  if (n < 1 || detail::trim(head[0]) != "beta") throw domain_error("quark CSV header must be beta,nu,m1..mn,re,im");
  QuarkCoeffs q;
  q.n = n;
  q.beta_cutoff = beta_cutoff;
  q.rho = rho;
  for (auto& beta : multi_indices(n, beta_cutoff)) q.values.emplace(beta, CoeffField(n, jmin, jmax));
  const int r = static_cast<int>(std::lround(rho));
  while (std::getline(is, line)) {
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line, ',');
    if (static_cast<int>(cells.size()) != n + 4) throw domain_error("quark CSV row has the wrong width");
    std::vector<int> beta;
    for (auto& t : detail::split(cells[0], '-')) beta.push_back(std::stoi(t));
    auto it = q.values.find(beta);
    if (it == q.values.end()) throw domain_error("quark CSV beta above the cutoff: " + cells[0]);
    DyadicCube Q{std::stoi(cells[1]) + r, Index(n)};
    for (int k = 0; k < n; ++k) Q.m[k] = std::stoll(cells[2 + k]);
    it->second.at(Q) = {detail::parse_double(cells[n + 2]), detail::parse_double(cells[n + 3])};
  }
  return q;
}

// ---------------------------------------------------------------- atom dictionaries

/// One grid file per atom named after its cube literal plus index.json with
/// the coefficients and the patch windows.
inline void save_atoms(const fs::path& dir, const AtomicDecomposition& d) {
  fs::create_directories(dir);
  json idx = {{"n", d.n}, {"J", d.J}, {"K", d.K}, {"atoms", json::array()}};
  for (auto& [Q, patch] : d.atoms) {
    std::string lit = cube_literal(Q);
    save_grid(dir / (lit + ".mkg"), patch.to_grid());
    cplx c = d.lambda.at(Q);
    idx["atoms"].push_back({{"cube", lit},
                            {"origin", patch.origin},
                            {"width", patch.width},
                            {"periodic", patch.periodic},
                            {"re", c.real()},
                            {"im", c.imag()}});
  }
  idx["jmin"] = d.lambda.jmin;
  idx["jmax"] = d.lambda.jmax;
  auto os = detail::open_out(dir / "index.json");
  os << idx.dump(1) << '\n';
}

inline AtomicDecomposition load_atoms(const fs::path& dir) {
  auto is = detail::open_in(dir / "index.json");
  json idx = json::parse(is);
  AtomicDecomposition d;
  d.n = idx.at("n");
  d.J = idx.at("J");
  d.K = idx.at("K");
  d.lambda = CoeffField(d.n, idx.at("jmin"), idx.at("jmax"));
  for (auto& a : idx.at("atoms")) {
    DyadicCube Q = parse_cube(a.at("cube"));
    GridFunction g = load_grid(dir / (a.at("cube").get<std::string>() + ".mkg"));
    Patch p = Patch::extract(g, a.at("origin").get<std::vector<int>>(), a.at("width").get<int>());
    p.periodic = a.at("periodic");
    d.lambda.at(Q) = {a.at("re").get<double>(), a.at("im").get<double>()};
    d.atoms.emplace(Q, std::move(p));
  }
  return d;
}

// ---------------------------------------------------------------- reports

/// {norm_kind, params, value}
inline json norm_json(const std::string& kind, const SpaceParams& p, const NormResult& r) {
  json j = {{"norm_kind", kind}, {"params", to_json(p)}, {"value", r.value}};
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

inline void write_report_csv(std::ostream& os, const Report& rep) {
  for (std::size_t k = 0; k < rep.columns.size(); ++k) os << (k ? "," : "") << rep.columns[k];
  os << '\n';
  for (auto& row : rep.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) os << ',';
      if (std::isnan(row[k]))
        os << "nan";
      else if (k < 2 && row[k] == std::floor(row[k]))
        os << static_cast<long long>(row[k]);
      else
        os << fmt_double(row[k]);
    }
    os << '\n';
  }
}

namespace detail {
inline json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}
}  // namespace detail

/// Per-series, per-depth constants plus pass/fail. The headline `constant`
/// and `depth` are the worst sup at the deepest level.
inline json summary_json(const Report& rep, const std::string& witness_path = "") {
  json series = json::array();
  double constant = 0.0;
  int depth = 0;
  for (auto& s : rep.series) {
    json d = json::array();
    for (auto& st : s.by_depth)
      d.push_back({{"depth", st.depth},
                   {"sup", detail::finite_or_string(st.sup)},
                   {"inf", detail::finite_or_string(st.inf)},
                   {"trials", st.trials},
                   {"skipped", st.skipped},
                   {"witness_trial", st.witness_trial}});
    series.push_back({{"label", s.label},
                      {"variation", detail::finite_or_string(Report::variation(s))},
                      {"by_depth", d}});
    if (!s.by_depth.empty() && !(s.by_depth.back().sup <= constant)) {
      constant = s.by_depth.back().sup;
      depth = s.by_depth.back().depth;
    }
  }
  if (rep.series.empty() && rep.stats.count("slope_weak")) constant = rep.stats.at("slope_weak");
  json stats = json::object();
  for (auto& [k, v] : rep.stats) stats[k] = detail::finite_or_string(v);
  return {{"campaign", rep.name},
          {"kind", kind_name(rep.kind)},
          {"depth", depth},
          {"constant", detail::finite_or_string(constant)},
          {"witness_path", witness_path},
          {"pass", rep.pass()},
          {"status", rep.status()},
          {"seed", rep.seed},
          {"law", rep.law},
          {"checks", rep.checks},
          {"failures", rep.failures},
          {"stats", stats},
          {"series", series}};
}

/// The worst-case witness. Inputs are regenerated from (config, trial) since
/// every trial seed is a pure function of the master seed and trial index.
inline json witness_json(const Report& rep, const json& config) {
  json w = {{"campaign", rep.name}, {"config", config}, {"seed", rep.seed}};
  double best = -kInf;
  for (auto& s : rep.series)
    for (auto& st : s.by_depth)
      if (st.trials > 0 && st.sup > best) {
        best = st.sup;
        w["series"] = s.label;
        w["depth"] = st.depth;
        w["trial"] = st.witness_trial;
        w["trial_seed"] = trial_seed(rep.seed, st.witness_trial);
        w["value"] = detail::finite_or_string(st.sup);
      }
  return w;
}

}  // namespace morreykit
