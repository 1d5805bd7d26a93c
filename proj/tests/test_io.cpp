#include <gtest/gtest.h>

#include <sstream>

#include "morreykit/suite.hpp"

using namespace morreykit;

namespace {

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("morreykit_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(d);
  return d / name;
}

GridFunction complex_grid(int n, int J, std::uint64_t seed) {
  GridFunction f(n, J);
  for (std::size_t i = 0; i < f.size(); ++i) f.data[i] = {hash_normal(mix64(seed, i)), hash_normal(mix64(seed + 1, i))};
  return f;
}

}  // namespace

TEST(GridIO, BinaryRoundTripIsBitExact) {
  auto f = complex_grid(2, 4, 5);
  std::stringstream ss;
  write_grid(ss, f);
  EXPECT_EQ(ss.str().size(), 16 + f.size() * 16);
  auto g = read_grid(ss);
  EXPECT_EQ(g.n, 2);
  EXPECT_EQ(g.J, 4);
  EXPECT_EQ(g.data, f.data);
}

TEST(GridIO, HeaderLayout) {
  GridFunction f(1, 2);
  std::stringstream ss;
  write_grid(ss, f);
  std::string s = ss.str();
  EXPECT_EQ(s.substr(0, 4), "MKGF");
  EXPECT_EQ(static_cast<unsigned char>(s[4]), 1);  // n, little endian
  EXPECT_EQ(static_cast<unsigned char>(s[8]), 4);  // G
  EXPECT_EQ(s.substr(12, 4), "c128");
}

TEST(GridIO, JsonAndFileRoundTrip) {
  auto f = complex_grid(1, 3, 9);
  EXPECT_EQ(grid_from_json(grid_to_json(f)).data, f.data);
  auto pj = scratch("g.json"), pb = scratch("g.mkg");
  save_grid(pj, f);
  save_grid(pb, f);
  EXPECT_EQ(load_grid(pj).data, f.data);
  EXPECT_EQ(load_grid(pb).data, f.data);
}

TEST(GridIO, RejectsGarbage) {
  std::stringstream ss("nope");
  EXPECT_THROW(read_grid(ss), domain_error);
  json bad = {{"n", 1}, {"G", 3}, {"re", {1, 2, 3}}};
  EXPECT_THROW(grid_from_json(bad), domain_error);
  json shortj = {{"n", 1}, {"G", 4}, {"re", {1, 2}}};
  EXPECT_THROW(grid_from_json(shortj), domain_error);
}

TEST(CoeffIO, SparseRoundTrip) {
  CoeffField lam(2, 0, 4);
  FieldLaw law{0.3, 1.0, true};
  lam = random_field(2, 0, 4, law, 11);
  std::stringstream ss;
  write_coeff_csv(ss, lam);
  std::string head;
  std::getline(ss, head);
  EXPECT_EQ(head, "j,m1,m2,re,im");
  ss.seekg(0);
  auto back = read_coeff_csv(ss, std::pair{0, 4});
  EXPECT_EQ(back, lam);
}

TEST(CoeffIO, DenseRoundTripInfersRange) {
  CoeffField lam(1, -2, 3);
  lam.at(-2, 0) = 1.5;
  lam.at(3, 7) = {0.1, -0.2};
  std::stringstream ss;
  write_coeff_csv(ss, lam, true);
  auto back = read_coeff_csv(ss);
  EXPECT_EQ(back, lam);
}

TEST(CoeffIO, RowsUseCubeIndices) {
  CoeffField lam(2, 1, 2);
  lam.at(DyadicCube{2, {1, 3}}) = 2.0;
  std::stringstream ss;
  write_coeff_csv(ss, lam);
  EXPECT_EQ(ss.str(), "j,m1,m2,re,im\n2,1,3,2,0\n");
}

TEST(CoeffIO, RejectsBadHeader) {
  std::stringstream ss("a,b,c\n");
  EXPECT_THROW(read_coeff_csv(ss), domain_error);
}

TEST(QuarkIO, RoundTrip) {
  auto f = random_bandlimited(1, 6, 6, 2);
  QuarkGen gen(1);
  auto qa = quark_analyze(f, gen, default_bank(), 3);
  std::stringstream ss;
  write_quark_csv(ss, qa.coeffs);
  std::string head;
  std::getline(ss, head);
  EXPECT_EQ(head, "beta,nu,m1,re,im");
  ss.seekg(0);
  auto& any = qa.coeffs.values.begin()->second;
  auto back = read_quark_csv(ss, 3, qa.coeffs.rho, any.jmin, any.jmax);
  ASSERT_EQ(back.values.size(), qa.coeffs.values.size());
  for (auto& [beta, field] : qa.coeffs.values) EXPECT_EQ(back.values.at(beta), field);
  EXPECT_NEAR(quark_residual(f, back), quark_residual(f, qa.coeffs), 1e-15);
}

TEST(AtomIO, DirectoryRoundTripSynthesizesTheSameFunction) {
  auto f = random_bandlimited(1, 6, 6, 4);
  RychkovPair pair(1, 6, 1);
  auto dec = atomic_analyze(f, pair);
  auto dir = scratch("atoms");
  save_atoms(dir, dec);
  EXPECT_TRUE(fs::exists(dir / "index.json"));
  EXPECT_TRUE(fs::exists(dir / (cube_literal(dec.atoms.begin()->first) + ".mkg")));
  auto back = load_atoms(dir);
  EXPECT_EQ(back.lambda, dec.lambda);
  auto a = synthesize(dec), b = synthesize(back);
  EXPECT_EQ(a.data, b.data);
}

TEST(ReportIO, CsvColumnsAndIntegers) {
  HardyConfig c;
  c.trials = 3;
  auto rep = hardy_campaign(c);
  std::stringstream ss;
  write_report_csv(ss, rep);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "trial,depth,ratio");
  std::getline(ss, line);
  EXPECT_EQ(line.substr(0, 5), "0,64,");
}

TEST(ReportIO, TraceColumnsMatchDeclaredFormat) {
  TraceCampaignConfig c;
  c.params = trace_preset("trace-E-a");
  c.depths = {3};
  c.trials = 2;
  auto rep = trace_campaign(c);
  std::stringstream ss;
  write_report_csv(ss, rep);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "trial,depth,constant_I,constant_II,constant_ext");
}

TEST(ReportIO, SummaryFields) {
  HardyConfig c;
  c.trials = 10;
  auto rep = hardy_campaign(c);
  auto s = summary_json(rep, "w.json");
  for (const char* k : {"campaign", "depth", "constant", "witness_path", "pass"}) EXPECT_TRUE(s.contains(k)) << k;
  EXPECT_EQ(s["campaign"], "hardy");
  EXPECT_EQ(s["pass"], true);
  EXPECT_EQ(s["witness_path"], "w.json");
  EXPECT_DOUBLE_EQ(s["constant"].get<double>(), rep.series[0].by_depth[0].sup);
}

TEST(ReportIO, WitnessRegeneratesTheWorstTrial) {
  HardyConfig c;
  c.trials = 50;
  auto rep = hardy_campaign(c);
  json cfg = {{"name", "hardy"}};
  auto w = witness_json(rep, cfg);
  std::size_t t = w["trial"];
  ASSERT_LT(t, c.trials);
  // rebuild the input from the recorded trial seed
  std::uint64_t s = w["trial_seed"];
  EXPECT_EQ(s, trial_seed(c.seed, t));
  std::vector<double> A(c.length);
  for (int j = 0; j < c.length; ++j) A[j] = std::abs(law_value(c.law, s, 0, j));
  double v = hardy_lhs(A, c.delta, c.r) / detail::lr_combine(A, c.r);
  EXPECT_DOUBLE_EQ(v, w["value"].get<double>());
}

TEST(NormIO, NormJsonShape) {
  SpaceParams p;
  NormResult r;
  r.value = 1.25;
  auto j = norm_json("space-E", p, r);
  EXPECT_EQ(j["norm_kind"], "space-E");
  EXPECT_EQ(j["value"], 1.25);
  EXPECT_EQ(params_from_json(j["params"]).q, p.q);
}

// ---------------------------------------------------------------- suite plumbing

TEST(Suite, AcceptanceListUsesKnownCampaigns) {
  auto names = campaign_names();
  auto list = acceptance_suite();
  EXPECT_GT(list.size(), 30u);
  for (auto& c : list) EXPECT_NE(std::find(names.begin(), names.end(), c.at("name").get<std::string>()), names.end());
}

TEST(Suite, EveryEntryPassesItsPreconditions) {
  RunOptions o;
  o.dry_run = true;
  for (auto& c : acceptance_suite()) {
    Report rep;
    ASSERT_NO_THROW(rep = run_campaign(c, o)) << c.dump();
    EXPECT_FALSE(rep.checks.empty()) << c.dump();
    EXPECT_TRUE(rep.rows.empty());
  }
}

TEST(Suite, SeedOverrideWins) {
  json c = {{"name", "hardy"}, {"seed", 3}, {"trials", 4}};
  RunOptions o;
  EXPECT_EQ(run_campaign(c, o).seed, 3u);
  o.seed = 99;
  EXPECT_EQ(run_campaign(c, o).seed, 99u);
}

TEST(Suite, SameConfigSameBytes) {
  json c = {{"name", "embedding"}, {"trials", 10}, {"depths", {4, 5}}};
  auto a = run_campaign(c), b = run_campaign(c);
  std::stringstream sa, sb;
  write_report_csv(sa, a);
  write_report_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(summary_json(a).dump(), summary_json(b).dump());
}

TEST(Suite, OutputsWritten) {
  json c = {{"name", "hardy"}, {"trials", 5}, {"tag", "h"}};
  auto rep = run_campaign(c);
  auto dir = scratch("suite");
  auto s = write_campaign_outputs(dir, campaign_stem(c, 0), rep, c);
  EXPECT_TRUE(fs::exists(dir / "00_h.csv"));
  EXPECT_TRUE(fs::exists(dir / "00_h.witness.json"));
  EXPECT_EQ(s["witness_path"], "00_h.witness.json");
}

TEST(Suite, UnknownCampaignThrows) {
  EXPECT_THROW(run_campaign(json{{"name", "nope"}}), domain_error);
}
