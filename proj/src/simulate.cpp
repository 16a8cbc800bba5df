#include "plcm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "plcm/diagnostics.hpp"
#include "plcm/priors.hpp"
#include "plcm/simplex_region.hpp"

namespace plcm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kRegionDrawCap = 2000;

std::string make_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%04zu", prefix, i + 1);
  return buf;
}

void check_truth(const SimTruth& truth, const PathogenPanel& panel) {
  const std::size_t n_path = panel.n_pathogens();
  if (truth.params.pi.size() != n_path ||
      truth.params.theta_brs.size() != n_path ||
      truth.params.psi_brs.size() != n_path ||
      truth.params.theta_ss.size() != panel.n_ss) {
    throw std::invalid_argument(
        "simulate_dataset: parameter dimensions do not match the panel");
  }
  if (!(truth.delta_frac >= 0.0) || !(truth.delta_frac <= 1.0) ||
      !(truth.ss_frac >= 0.0) || !(truth.ss_frac <= 1.0)) {
    throw std::invalid_argument(
        "simulate_dataset: availability fractions must lie in [0, 1]");
  }
}

// First ceil(frac * n) positions of a seeded shuffle get the flag.
std::vector<std::uint8_t> random_subset(std::size_t n, double frac, Rng& rng) {
  std::vector<std::uint8_t> flag(n, 0);
  const std::size_t k = std::min(
      n, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n))));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rng.shuffle(idx);
  for (std::size_t i = 0; i < k; ++i) flag[idx[i]] = 1;
  return flag;
}

void fill_case_measurements(SubjectRecord& s, std::size_t cause,
                            const ModelParams& params, std::size_t n_ss,
                            Rng& rng) {
  const std::size_t n_path = params.pi.size();
  for (std::size_t l = 0; l < n_path; ++l) {
    const double rate =
        l == cause ? params.theta_brs[l] : params.psi_brs[l];
    s.brs[l] = rng.bernoulli(rate) ? 1 : 0;
  }
  if (s.has_ss) {
    auto& ss = *s.ss;
    std::fill(ss.begin(), ss.end(), 0);
    if (cause < n_ss) {
      ss[cause] = rng.bernoulli(params.theta_ss[cause]) ? 1 : 0;
    }
  }
  if (s.has_gs) {
    auto& gs = *s.gs;
    std::fill(gs.begin(), gs.end(), 0);
    gs[cause] = 1;
  }
}

}  // namespace

Dataset simulate_dataset(const SimTruth& truth, const PathogenPanel& panel) {
  check_truth(truth, panel);
  Rng rng(truth.seed);
  const std::size_t n_path = panel.n_pathogens();
  const std::size_t n_ss = panel.n_ss;
  const std::vector<std::uint8_t> gs_flag =
      random_subset(truth.n1, truth.delta_frac, rng);
  const std::vector<std::uint8_t> ss_flag =
      random_subset(truth.n1, truth.ss_frac, rng);

  std::vector<double> lpi(n_path);
  for (std::size_t j = 0; j < n_path; ++j) lpi[j] = std::log(truth.params.pi[j]);

  std::vector<SubjectRecord> subjects;
  subjects.reserve(truth.n1 + truth.n0);
  for (std::size_t i = 0; i < truth.n1; ++i) {
    SubjectRecord s;
    s.id = make_id("case", i);
    s.is_case = true;
    s.has_gs = gs_flag[i] != 0;
    s.has_ss = ss_flag[i] != 0;
    s.brs.resize(n_path);
    if (s.has_ss) s.ss = std::vector<std::uint8_t>(n_ss, 0);
    if (s.has_gs) s.gs = std::vector<std::uint8_t>(n_path, 0);
    const std::size_t cause =
        static_cast<std::size_t>(rng.categorical_log(lpi));
    fill_case_measurements(s, cause, truth.params, n_ss, rng);
    subjects.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < truth.n0; ++i) {
    SubjectRecord s;
    s.id = make_id("ctrl", i);
    s.is_case = false;
    s.brs.resize(n_path);
    for (std::size_t l = 0; l < n_path; ++l) {
      s.brs[l] = rng.bernoulli(truth.params.psi_brs[l]) ? 1 : 0;
    }
    subjects.push_back(std::move(s));
  }
  return Dataset(panel, std::move(subjects));
}

Dataset simulate_like(const Dataset& ds, const ModelParams& params, Rng& rng) {
  const std::size_t n_path = ds.panel.n_pathogens();
  const std::size_t n_ss = ds.panel.n_ss;
  if (params.pi.size() != n_path || params.theta_ss.size() != n_ss) {
    throw std::invalid_argument(
        "simulate_like: parameter dimensions do not match the dataset panel");
  }
  std::vector<double> lpi(n_path);
  for (std::size_t j = 0; j < n_path; ++j) lpi[j] = std::log(params.pi[j]);

  Dataset out = ds;
  for (SubjectRecord& s : out.subjects) {
    if (!s.is_case) {
      for (std::size_t l = 0; l < n_path; ++l) {
        s.brs[l] = rng.bernoulli(params.psi_brs[l]) ? 1 : 0;
      }
      continue;
    }
    const std::size_t cause =
        static_cast<std::size_t>(rng.categorical_log(lpi));
    fill_case_measurements(s, cause, params, n_ss, rng);
  }
  return out;
}

Dataset strip_gold(const Dataset& ds) {
  Dataset out = ds;
  for (SubjectRecord& s : out.subjects) {
    s.has_gs = false;
    s.gs.reset();
  }
  return out;
}

namespace {

// Pooled pi draws for one component across chains.
std::vector<double> pooled_pi_component(const ChainSet& cs, std::size_t j) {
  std::vector<double> out;
  out.reserve(cs.n_total_draws());
  for (const ChainDraws& c : cs.chains) {
    for (const ModelParams& d : c.draws) out.push_back(d.pi[j]);
  }
  return out;
}

void summarize_mcmc_arm(ArmReport& arm, const ChainSet& cs,
                        const std::vector<double>& true_pi, bool ternary) {
  const std::size_t n_path = true_pi.size();
  std::vector<double> means(n_path);
  std::vector<std::uint8_t> cover(n_path);
  std::vector<double> bgrs(n_path, kNaN);
  for (std::size_t j = 0; j < n_path; ++j) {
    std::vector<double> comp = pooled_pi_component(cs, j);
    double s = 0.0;
    for (double v : comp) s += v;
    means[j] = s / static_cast<double>(comp.size());
    std::sort(comp.begin(), comp.end());
    const double lo = empirical_quantile(comp, 0.025);
    const double hi = empirical_quantile(comp, 0.975);
    cover[j] = (lo <= true_pi[j] && true_pi[j] <= hi) ? 1 : 0;
    if (cs.chains.size() >= 2) {
      std::vector<std::vector<double>> per_chain;
      per_chain.reserve(cs.chains.size());
      for (const ChainDraws& c : cs.chains) {
        std::vector<double> series;
        series.reserve(c.draws.size());
        for (const ModelParams& d : c.draws) series.push_back(d.pi[j]);
        per_chain.push_back(std::move(series));
      }
      bgrs[j] = bgr_statistic(per_chain);
    }
  }
  arm.post_mean.push_back(std::move(means));
  arm.ci_cover.push_back(std::move(cover));
  arm.pi_bgr.push_back(std::move(bgrs));

  if (ternary) {
    const std::size_t total = cs.n_total_draws();
    const std::size_t stride = std::max<std::size_t>(1, total / kRegionDrawCap);
    std::vector<std::vector<double>> sub;
    sub.reserve(total / stride + 1);
    std::size_t flat = 0;
    for (const ChainDraws& c : cs.chains) {
      for (const ModelParams& d : c.draws) {
        if (flat % stride == 0) sub.push_back(d.pi);
        ++flat;
      }
    }
    const SimplexRegion region = credible_region_simplex(sub, 0.95);
    arm.region_area.push_back(region_area(region));
    arm.region_cover.push_back(region_contains(region, true_pi) ? 1 : 0);
  }
}

void finalize_arm(ArmReport& arm, const std::vector<double>& true_pi) {
  const std::size_t n_path = true_pi.size();
  const std::size_t n_rep = arm.post_mean.size();
  arm.mean_bias.assign(n_path, 0.0);
  arm.coverage.assign(n_path, 0.0);
  for (std::size_t r = 0; r < n_rep; ++r) {
    for (std::size_t j = 0; j < n_path; ++j) {
      arm.mean_bias[j] += arm.post_mean[r][j] - true_pi[j];
      arm.coverage[j] += arm.ci_cover[r][j];
    }
  }
  for (std::size_t j = 0; j < n_path; ++j) {
    arm.mean_bias[j] /= static_cast<double>(n_rep);
    arm.coverage[j] /= static_cast<double>(n_rep);
  }
  if (!arm.region_area.empty()) {
    double area = 0.0, cov = 0.0;
    for (double a : arm.region_area) area += a;
    for (std::uint8_t c : arm.region_cover) cov += c;
    arm.mean_region_area = area / static_cast<double>(arm.region_area.size());
    arm.region_coverage = cov / static_cast<double>(arm.region_cover.size());
  } else {
    arm.mean_region_area = kNaN;
    arm.region_coverage = kNaN;
  }
}

}  // namespace

StudyReport replicate_study(const SimTruth& truth, const PathogenPanel& panel,
                            std::size_t n_replicates,
                            const McmcOptions& fit_options) {
  if (n_replicates == 0) {
    throw std::invalid_argument("replicate_study: n_replicates must be >= 1");
  }
  const std::size_t n_path = panel.n_pathogens();
  const bool ternary = n_path == 3;
  const HyperPriors hyper = default_hyperpriors(panel);

  StudyReport report;
  report.truth = truth;
  report.n_replicates = n_replicates;
  report.fit_options = fit_options;
  report.arms.resize(3);
  report.arms[0].arm = "brs_only";
  report.arms[1].arm = "brs_gs";
  report.arms[2].arm = "gs_only";

  for (std::size_t r = 0; r < n_replicates; ++r) {
    SimTruth t = truth;
    t.seed = truth.seed + r;
    const Dataset ds = simulate_dataset(t, panel);
    const std::uint64_t base = fit_options.seed + 1000 * r;

    {
      McmcOptions opts = fit_options;
      opts.seed = base;
      const ChainSet cs = run_chains(strip_gold(ds), hyper, opts);
      summarize_mcmc_arm(report.arms[0], cs, truth.params.pi, ternary);
    }
    {
      McmcOptions opts = fit_options;
      opts.seed = base + 500;
      const ChainSet cs = run_chains(ds, hyper, opts);
      summarize_mcmc_arm(report.arms[1], cs, truth.params.pi, ternary);
    }
    {
      // conjugate gold-only analysis: Dirichlet(a + gold cause counts)
      std::vector<double> alpha = hyper.a;
      const auto& rows = ds.case_rows();
      for (const std::size_t row : rows) {
        const SubjectRecord& s = ds.subjects[row];
        if (s.has_gs && s.gs) alpha[s.gs_cause()] += 1.0;
      }
      const double alpha0 =
          std::accumulate(alpha.begin(), alpha.end(), 0.0);
      std::vector<double> means(n_path);
      std::vector<std::uint8_t> cover(n_path);
      for (std::size_t j = 0; j < n_path; ++j) {
        means[j] = alpha[j] / alpha0;
        const double lo = beta_quantile(alpha[j], alpha0 - alpha[j], 0.025);
        const double hi = beta_quantile(alpha[j], alpha0 - alpha[j], 0.975);
        cover[j] =
            (lo <= truth.params.pi[j] && truth.params.pi[j] <= hi) ? 1 : 0;
      }
      ArmReport& arm = report.arms[2];
      arm.post_mean.push_back(std::move(means));
      arm.ci_cover.push_back(std::move(cover));
      if (ternary) {
        Rng rng(base + 999);
        std::vector<std::vector<double>> draws;
        draws.reserve(kRegionDrawCap);
        for (std::size_t i = 0; i < kRegionDrawCap; ++i) {
          draws.push_back(rng.dirichlet(alpha));
        }
        const SimplexRegion region = credible_region_simplex(draws, 0.95);
        arm.region_area.push_back(region_area(region));
        arm.region_cover.push_back(
            region_contains(region, truth.params.pi) ? 1 : 0);
      }
    }
  }
  for (ArmReport& arm : report.arms) finalize_arm(arm, truth.params.pi);
  return report;
}

}  // namespace plcm
