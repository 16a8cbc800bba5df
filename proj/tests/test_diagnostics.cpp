#include "plcm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "plcm/rng.hpp"
#include "plcm/simulate.hpp"

using namespace plcm;

namespace {

std::vector<double> ar1_series(Rng& rng, std::size_t n, double phi) {
  std::vector<double> x(n);
  double prev = rng.normal();
  const double s = std::sqrt(1.0 - phi * phi);
  for (std::size_t i = 0; i < n; ++i) {
    prev = phi * prev + s * rng.normal();
    x[i] = prev;
  }
  return x;
}

std::vector<double> iid_series(Rng& rng, std::size_t n, double mu = 0.0) {
  std::vector<double> x(n);
  for (auto& v : x) v = mu + rng.normal();
  return x;
}

ChainSet degenerate_chainset(const PathogenPanel& panel, const ModelParams& p,
                             std::size_t n_draws) {
  ChainSet cs;
  cs.panel = panel;
  cs.chains.resize(1);
  cs.chains[0].draws.assign(n_draws, p);
  return cs;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("empirical quantile interpolates linearly on sorted samples") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  CHECK(empirical_quantile(x, 0.0) == 1.0);
  CHECK(empirical_quantile(x, 1.0) == 4.0);
  CHECK(empirical_quantile(x, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(empirical_quantile(x, 1.0 / 3.0) == doctest::Approx(2.0).epsilon(1e-12));
  const std::vector<double> one = {7.0};
  CHECK(empirical_quantile(one, 0.25) == 7.0);
}

TEST_CASE("identical chains give the analytic shrink factor") {
  Rng rng(601);
  const std::size_t n = 500;
  const std::vector<double> base = ar1_series(rng, n, 0.5);
  const std::vector<std::vector<double>> chains = {base, base, base};
  const double expect = std::sqrt(double(n - 1) / double(n));
  CHECK(std::fabs(bgr_statistic(chains) - expect) < 1e-6);
}

TEST_CASE("well-separated chains blow the scale reduction factor up") {
  Rng rng(602);
  const std::vector<std::vector<double>> chains = {iid_series(rng, 400, 0.0),
                                                   iid_series(rng, 400, 10.0)};
  CHECK(bgr_statistic(chains) > 3.0);
}

TEST_CASE("mixed chains from one distribution stay near one") {
  Rng rng(603);
  const std::vector<std::vector<double>> chains = {iid_series(rng, 2000),
                                                   iid_series(rng, 2000),
                                                   iid_series(rng, 2000)};
  const double r = bgr_statistic(chains);
  CHECK(r > 0.95);
  CHECK(r < 1.05);
}

TEST_CASE("degenerate chains produce NaN or infinity, not garbage") {
  const std::vector<double> c1(50, 2.0);
  const std::vector<double> c2(50, 2.0);
  CHECK(std::isnan(bgr_statistic({c1, c2})));
  const std::vector<double> c3(50, 3.0);
  CHECK(std::isinf(bgr_statistic({c1, c3})));
}

TEST_CASE("scale reduction rejects unusable inputs") {
  const std::vector<double> ok(50, 1.0);
  CHECK_THROWS_AS((void)bgr_statistic({ok}), std::invalid_argument);
  const std::vector<double> tiny(5, 1.0);
  CHECK_THROWS_AS((void)bgr_statistic({tiny, tiny}), std::invalid_argument);
}

TEST_CASE("autocorrelation recovers the AR(1) decay") {
  Rng rng(604);
  const std::vector<double> x = ar1_series(rng, 20000, 0.8);
  const std::vector<double> acf = autocorrelation(x, 3);
  REQUIRE(acf.size() == 4);
  CHECK(acf[0] == 1.0);
  CHECK(std::fabs(acf[1] - 0.8) < 0.03);
  CHECK(std::fabs(acf[2] - 0.64) < 0.04);
  CHECK(std::fabs(acf[3] - 0.512) < 0.05);
}

TEST_CASE("white noise has vanishing autocorrelation") {
  Rng rng(605);
  const std::vector<double> x = iid_series(rng, 20000);
  const std::vector<double> acf = autocorrelation(x, 5);
  for (std::size_t t = 1; t < acf.size(); ++t) {
    CHECK(std::fabs(acf[t]) < 5.0 / std::sqrt(20000.0));
  }
}

TEST_CASE("constant series yields undefined autocorrelation") {
  const std::vector<double> x(100, 3.14);
  const std::vector<double> acf = autocorrelation(x, 2);
  for (std::size_t t = 1; t < acf.size(); ++t) CHECK(std::isnan(acf[t]));
}

TEST_CASE("effective sample size is near n for independent draws") {
  Rng rng(606);
  const std::vector<double> x = iid_series(rng, 10000);
  const double ess = effective_sample_size(x);
  CHECK(ess > 8500.0);
  CHECK(ess < 11500.0);
}

TEST_CASE("effective sample size shrinks by the integrated autocorrelation") {
  Rng rng(607);
  const std::vector<double> x = ar1_series(rng, 40000, 0.8);
  // integrated autocorrelation time of AR(0.8) is (1+phi)/(1-phi) = 9
  const double ess = effective_sample_size(x);
  CHECK(ess > 40000.0 / 9.0 * 0.7);
  CHECK(ess < 40000.0 / 9.0 * 1.4);
}

TEST_CASE("effective sample size guards short or constant input") {
  const std::vector<double> tiny = {1.0, 2.0, 3.0};
  CHECK(std::isnan(effective_sample_size(tiny)));
  const std::vector<double> flat(100, 1.0);
  CHECK(std::isnan(effective_sample_size(flat)));
}

TEST_CASE("posterior summary pools chains and labels rows canonically") {
  const PathogenPanel panel({"A", "B"}, 1);
  Rng rng(608);
  ChainSet cs;
  cs.panel = panel;
  cs.options.n_chains = 2;
  cs.chains.resize(2);
  for (auto& chain : cs.chains) {
    for (int t = 0; t < 400; ++t) {
      ModelParams p;
      const double u = 0.3 + 0.4 * rng.uniform();
      p.pi = {u, 1.0 - u};
      p.theta_brs = {0.7 + 0.1 * rng.uniform(), 0.8};
      p.psi_brs = {0.1, 0.2 + 0.05 * rng.uniform()};
      p.theta_ss = {0.5 + 0.2 * rng.uniform()};
      chain.draws.push_back(std::move(p));
    }
  }
  const PosteriorSummary sum = posterior_summary(cs);
  const std::vector<std::string> labels = parameter_labels(panel);
  REQUIRE(sum.rows.size() == labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(sum.rows[i].name == labels[i]);
  }
  // pi_A pooled moments: uniform on (0.3, 0.7)
  CHECK(std::fabs(sum.rows[0].mean - 0.5) < 0.02);
  CHECK(std::fabs(sum.rows[0].sd - 0.4 / std::sqrt(12.0)) < 0.01);
  CHECK(sum.rows[0].q025 < sum.rows[0].q25);
  CHECK(sum.rows[0].q25 < sum.rows[0].q50);
  CHECK(sum.rows[0].q50 < sum.rows[0].q75);
  CHECK(sum.rows[0].q75 < sum.rows[0].q975);
  // theta_brs_B is constant: undefined dispersion diagnostics, exact quantiles
  const ParamSummary& constant_row = sum.rows[3];
  CHECK(constant_row.name == "theta_brs_B");
  CHECK(constant_row.mean == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(constant_row.q50 == doctest::Approx(0.8).epsilon(1e-12));
  // iid draws across two chains: bgr near 1, ess near the pooled count
  CHECK(std::fabs(sum.rows[0].bgr - 1.0) < 0.03);
  CHECK(sum.rows[0].ess > 0.6 * 800.0);

  ChainSet solo;
  solo.panel = panel;
  solo.chains.push_back(cs.chains[0]);
  const PosteriorSummary s1 = posterior_summary(solo);
  CHECK(std::isnan(s1.rows[0].bgr));
}

TEST_CASE("noiseless measurements give one-hot case patterns in the ppc") {
  const PathogenPanel panel({"A", "B", "C"}, 0);
  ModelParams truth;
  truth.pi = {0.5, 0.3, 0.2};
  truth.theta_brs = {1.0, 1.0, 1.0};
  truth.psi_brs = {0.0, 0.0, 0.0};
  SimTruth sim;
  sim.params = truth;
  sim.n1 = 100;
  sim.n0 = 100;
  sim.seed = 609;
  const Dataset ds = simulate_dataset(sim, panel);
  const ChainSet cs = degenerate_chainset(panel, truth, 60);

  const PatternPpc ppc = ppc_pattern_frequencies(ds, cs, 8, 610);
  CHECK(ppc.n_replicates_used == 60);

  // every control is all-negative, in the data and in every replicate
  REQUIRE(ppc.control_rows.size() == 1);
  CHECK(ppc.control_rows[0].pattern == std::vector<std::uint8_t>{0, 0, 0});
  CHECK(ppc.control_rows[0].observed == 100);
  CHECK(ppc.control_rows[0].pred_lo == 100.0);
  CHECK(ppc.control_rows[0].pred_med == 100.0);
  CHECK(ppc.control_rows[0].pred_hi == 100.0);

  // cases show exactly their cause coordinate
  REQUIRE(!ppc.case_rows.empty());
  std::size_t total_observed = 0;
  for (std::size_t i = 0; i < ppc.case_rows.size(); ++i) {
    const PatternRow& row = ppc.case_rows[i];
    int ones = 0;
    for (auto b : row.pattern) ones += b;
    CHECK(ones == 1);
    if (i > 0) CHECK(row.observed <= ppc.case_rows[i - 1].observed);
    CHECK(row.pred_lo <= row.pred_med);
    CHECK(row.pred_med <= row.pred_hi);
    total_observed += row.observed;
  }
  CHECK(total_observed == 100);
}

TEST_CASE("ppc intervals cover data simulated from the fitted parameters") {
  const PathogenPanel panel({"A", "B"}, 0);
  ModelParams truth;
  truth.pi = {0.6, 0.4};
  truth.theta_brs = {0.85, 0.8};
  truth.psi_brs = {0.15, 0.1};
  SimTruth sim;
  sim.params = truth;
  sim.n1 = 200;
  sim.n0 = 200;
  sim.seed = 611;
  const Dataset ds = simulate_dataset(sim, panel);
  const ChainSet cs = degenerate_chainset(panel, truth, 200);
  const PatternPpc ppc = ppc_pattern_frequencies(ds, cs, 4, 612);
  std::size_t covered = 0, rows = 0;
  for (const auto& group : {ppc.case_rows, ppc.control_rows}) {
    for (const PatternRow& row : group) {
      ++rows;
      covered += (row.observed >= row.pred_lo && row.observed <= row.pred_hi);
    }
  }
  REQUIRE(rows >= 6);
  // each 95% interval may miss occasionally even under the true model
  CHECK(covered + 1 >= rows);
}

TEST_CASE("predictive checks replay exactly from their seed") {
  const PathogenPanel panel({"A", "B"}, 0);
  ModelParams truth;
  truth.pi = {0.6, 0.4};
  truth.theta_brs = {0.85, 0.8};
  truth.psi_brs = {0.15, 0.1};
  SimTruth sim;
  sim.params = truth;
  sim.n1 = 80;
  sim.n0 = 80;
  sim.seed = 615;
  const Dataset ds = simulate_dataset(sim, panel);
  const ChainSet cs = degenerate_chainset(panel, truth, 150);

  const PatternPpc a = ppc_pattern_frequencies(ds, cs, 4, 616);
  const PatternPpc b = ppc_pattern_frequencies(ds, cs, 4, 616);
  REQUIRE(a.case_rows.size() == b.case_rows.size());
  for (std::size_t i = 0; i < a.case_rows.size(); ++i) {
    CHECK(a.case_rows[i].pattern == b.case_rows[i].pattern);
    CHECK(a.case_rows[i].pred_lo == b.case_rows[i].pred_lo);
    CHECK(a.case_rows[i].pred_med == b.case_rows[i].pred_med);
    CHECK(a.case_rows[i].pred_hi == b.case_rows[i].pred_hi);
  }

  const SlorTable s1 = ppc_slor(ds, cs, 617);
  const SlorTable s2 = ppc_slor(ds, cs, 617);
  CHECK(s1.defined == s2.defined);
  for (std::size_t i = 0; i < s1.slor.size(); ++i) {
    if (!s1.defined[i]) continue;  // masked cells hold NaN by design
    CHECK(s1.slor[i] == s2.slor[i]);
    CHECK(s1.pred_mean[i] == s2.pred_mean[i]);
    CHECK(s1.pred_sd[i] == s2.pred_sd[i]);
  }

  // a different seed perturbs the predictive intervals
  const SlorTable s3 = ppc_slor(ds, cs, 618);
  bool any_changed = false;
  for (std::size_t i = 0; i < s1.pred_mean.size(); ++i) {
    if (s1.defined[i] && s1.pred_mean[i] != s3.pred_mean[i]) {
      any_changed = true;
    }
  }
  CHECK(any_changed);
}

TEST_CASE("planted association among controls produces an extreme slor") {
  const PathogenPanel panel({"A", "B", "C"}, 0);
  Rng rng(613);
  std::vector<SubjectRecord> subjects;
  for (int i = 0; i < 60; ++i) {
    SubjectRecord s;
    s.id = "c" + std::to_string(i);
    s.is_case = true;
    s.brs = {rng.bernoulli(0.3), rng.bernoulli(0.3), rng.bernoulli(0.3)};
    subjects.push_back(std::move(s));
  }
  for (int i = 0; i < 300; ++i) {
    SubjectRecord s;
    s.id = "x" + std::to_string(i);
    s.is_case = false;
    const std::uint8_t shared = rng.bernoulli(0.5);
    s.brs = {shared, shared, 0};  // A and B perfectly coupled, C never seen
    subjects.push_back(std::move(s));
  }
  const Dataset ds(panel, subjects);

  ModelParams fitted;  // believes in independent coordinates
  fitted.pi = {0.4, 0.3, 0.3};
  fitted.theta_brs = {0.8, 0.8, 0.8};
  fitted.psi_brs = {0.5, 0.5, 0.1};
  const ChainSet cs = degenerate_chainset(panel, fitted, 120);

  const SlorTable table = ppc_slor(ds, cs, 614);
  REQUIRE(table.n_path == 3);
  CHECK(table.n_replicates_used == 120);
  // diagonal is never defined
  for (std::size_t j = 0; j < 3; ++j) CHECK(!table.defined[table.at(j, j)]);
  // control pair (A, B) sits in the upper triangle and is wildly outside
  // the independent model's predictive range
  const std::size_t ab = table.at(0, 1);
  REQUIRE(table.defined[ab]);
  CHECK(table.slor[ab] > 2.0);
  CHECK(std::fabs(table.pred_mean[ab]) < 1.0);
  CHECK(table.pred_sd[ab] > 0.0);
  // C never varies among controls: its control-side pairs are masked
  CHECK(!table.defined[table.at(0, 2)]);
  CHECK(!table.defined[table.at(1, 2)]);
}

TEST_CASE("model-consistent data keeps standardized residuals moderate") {
  const PathogenPanel panel({"A", "B", "C"}, 0);
  ModelParams truth;
  truth.pi = {0.5, 0.3, 0.2};
  truth.theta_brs = {0.85, 0.8, 0.75};
  truth.psi_brs = {0.2, 0.25, 0.15};
  SimTruth sim;
  sim.params = truth;
  sim.n1 = 250;
  sim.n0 = 250;
  sim.seed = 615;
  const Dataset ds = simulate_dataset(sim, panel);
  const ChainSet cs = degenerate_chainset(panel, truth, 150);
  const SlorTable table = ppc_slor(ds, cs, 616);
  std::size_t defined = 0, extreme = 0;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (r == c || !table.defined[table.at(r, c)]) continue;
      ++defined;
      extreme += std::fabs(table.slor[table.at(r, c)]) > 2.0;
    }
  }
  REQUIRE(defined == 6);
  CHECK(extreme <= 1);
}

}  // TEST_SUITE
