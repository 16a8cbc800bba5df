#include "plcm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "plcm/simulate.hpp"

namespace plcm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_var(std::span<const double> x, double mean) {
  if (x.size() < 2) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return s / static_cast<double>(x.size() - 1);
}

double sample_cov(std::span<const double> x, std::span<const double> y,
                  double mx, double my) {
  if (x.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += (x[i] - mx) * (y[i] - my);
  }
  return s / static_cast<double>(x.size() - 1);
}

// Scalar at flat index p of the canonical parameter order (see
// flatten_params): pi, theta_brs, psi_brs, theta_ss.
double param_scalar(const ModelParams& mp, std::size_t p) {
  const std::size_t j = mp.pi.size();
  if (p < j) return mp.pi[p];
  if (p < 2 * j) return mp.theta_brs[p - j];
  if (p < 3 * j) return mp.psi_brs[p - 2 * j];
  return mp.theta_ss[p - 3 * j];
}

const ModelParams& draw_at(const ChainSet& chains, std::size_t flat) {
  for (const ChainDraws& c : chains.chains) {
    if (flat < c.draws.size()) return c.draws[flat];
    flat -= c.draws.size();
  }
  throw std::out_of_range("draw_at: flat draw index out of range");
}

// Evenly spread flat draw indices for predictive replicates.
std::vector<std::size_t> replicate_indices(std::size_t total,
                                           std::size_t wanted) {
  const std::size_t n = std::min(total, wanted);
  std::vector<std::size_t> idx(n);
  for (std::size_t k = 0; k < n; ++k) idx[k] = k * total / n;
  return idx;
}

// A variance this small relative to the location is indistinguishable from
// rounding noise on a constant series (summing a non-representable constant
// yields g0 of order (n * eps * mean)^2, not exactly zero).
bool negligible_variance(double var, double mean) {
  return var <= 1e-24 * (1.0 + mean * mean);
}

}  // namespace

double empirical_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    throw std::invalid_argument("empirical_quantile: empty sample");
  }
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

double bgr_statistic(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  if (m < 2) {
    throw std::invalid_argument("bgr_statistic: at least 2 chains required");
  }
  std::size_t n = chains.front().size();
  for (const auto& c : chains) n = std::min(n, c.size());
  if (n < 10) {
    throw std::invalid_argument(
        "bgr_statistic: each chain needs at least 10 draws");
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);

  std::vector<double> means(m), vars(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::span<const double> c(chains[i].data(), n);
    means[i] = mean_of(c);
    vars[i] = sample_var(c, means[i]);
  }
  const double w = mean_of(vars);
  const double grand = mean_of(means);
  const double b = dn * sample_var(means, grand);
  const double v = (dn - 1.0) / dn * w + (1.0 + 1.0 / dm) * b / dn;
  if (negligible_variance(w, grand)) {
    return negligible_variance(b / dn, grand)
               ? kNaN
               : std::numeric_limits<double>::infinity();
  }

  // degrees-of-freedom correction for the variance-ratio estimator
  std::vector<double> means2(m);
  for (std::size_t i = 0; i < m; ++i) means2[i] = means[i] * means[i];
  const double var_w = sample_var(vars, w) / dm;
  const double var_b = 2.0 * b * b / (dm - 1.0);
  const double cov_wb =
      (dn / dm) * (sample_cov(vars, means2, w, mean_of(means2)) -
                   2.0 * grand * sample_cov(vars, means, w, grand));
  const double var_v = ((dn - 1.0) * (dn - 1.0) * var_w +
                        std::pow(1.0 + 1.0 / dm, 2) * var_b +
                        2.0 * (dn - 1.0) * (1.0 + 1.0 / dm) * cov_wb) /
                       (dn * dn);
  double adjust = 1.0;
  if (var_v > 0.0) {
    const double d = 2.0 * v * v / var_v;
    adjust = (d + 3.0) / (d + 1.0);
  }
  return std::sqrt(adjust * v / w);
}

std::vector<double> autocorrelation(std::span<const double> draws,
                                    std::size_t max_lag) {
  const std::size_t n = draws.size();
  if (n < 2) {
    throw std::invalid_argument("autocorrelation: need at least 2 draws");
  }
  const double mean = mean_of(draws);
  double g0 = 0.0;
  for (double v : draws) g0 += (v - mean) * (v - mean);
  std::vector<double> acf(max_lag + 1, kNaN);
  if (negligible_variance(g0 / static_cast<double>(n), mean)) {
    return acf;  // constant series: undefined, flagged as NaN
  }
  acf[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag && k < n; ++k) {
    double gk = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) {
      gk += (draws[i] - mean) * (draws[i + k] - mean);
    }
    acf[k] = gk / g0;
  }
  return acf;
}

double effective_sample_size(std::span<const double> draws) {
  const std::size_t n = draws.size();
  if (n < 8) return kNaN;
  const double dn = static_cast<double>(n);
  const double mean = mean_of(draws);
  const auto gamma_k = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) {
      s += (draws[i] - mean) * (draws[i + k] - mean);
    }
    return s / dn;
  };
  const double g0 = gamma_k(0);
  if (g0 <= 0.0 || negligible_variance(g0, mean)) return kNaN;
  double acc = -g0;
  for (std::size_t t = 0; 2 * t + 1 < n; ++t) {
    const double pair = gamma_k(2 * t) + gamma_k(2 * t + 1);
    if (pair <= 0.0) break;
    acc += 2.0 * pair;
  }
  const double tau = std::max(acc / g0, 1e-12);
  return dn / tau;
}

PosteriorSummary posterior_summary(const ChainSet& chains) {
  const std::vector<std::string> labels = parameter_labels(chains.panel);
  const std::size_t n_params = labels.size();
  const std::size_t m = chains.chains.size();
  PosteriorSummary summary;
  summary.rows.resize(n_params);

  std::vector<std::vector<double>> per_chain(m);
  std::vector<double> pooled;
  for (std::size_t p = 0; p < n_params; ++p) {
    pooled.clear();
    for (std::size_t c = 0; c < m; ++c) {
      per_chain[c].clear();
      for (const ModelParams& d : chains.chains[c].draws) {
        per_chain[c].push_back(param_scalar(d, p));
      }
      pooled.insert(pooled.end(), per_chain[c].begin(), per_chain[c].end());
    }
    if (pooled.empty()) {
      throw std::invalid_argument("posterior_summary: no draws available");
    }
    ParamSummary& row = summary.rows[p];
    row.name = labels[p];
    row.mean = mean_of(pooled);
    row.sd = std::sqrt(sample_var(pooled, row.mean));
    std::sort(pooled.begin(), pooled.end());
    row.q025 = empirical_quantile(pooled, 0.025);
    row.q25 = empirical_quantile(pooled, 0.25);
    row.q50 = empirical_quantile(pooled, 0.50);
    row.q75 = empirical_quantile(pooled, 0.75);
    row.q975 = empirical_quantile(pooled, 0.975);
    const bool bgr_ok =
        m >= 2 && std::all_of(per_chain.begin(), per_chain.end(),
                              [](const auto& c) { return c.size() >= 10; });
    row.bgr = bgr_ok ? bgr_statistic(per_chain) : kNaN;
    double ess = 0.0;
    for (const auto& c : per_chain) ess += effective_sample_size(c);
    row.ess = ess;
  }
  return summary;
}

PatternPpc ppc_pattern_frequencies(const Dataset& ds, const ChainSet& chains,
                                   std::size_t top_k, std::uint64_t seed) {
  using Pattern = std::vector<std::uint8_t>;
  const std::size_t total = chains.n_total_draws();
  if (total == 0) {
    throw std::invalid_argument("ppc_pattern_frequencies: no draws available");
  }
  std::map<Pattern, std::size_t> observed[2];  // [0]=controls, [1]=cases
  for (const SubjectRecord& s : ds.subjects) {
    ++observed[s.is_case ? 1 : 0][s.brs];
  }

  // rank by observed count (descending), then pattern (ascending)
  struct Tracked {
    Pattern pattern;
    std::size_t observed = 0;
    std::vector<double> rep_counts;
  };
  std::vector<Tracked> tracked[2];
  std::map<Pattern, std::size_t> slot_of[2];
  for (int g = 0; g < 2; ++g) {
    std::vector<std::pair<std::size_t, Pattern>> ranked;
    ranked.reserve(observed[g].size());
    for (const auto& [pat, cnt] : observed[g]) ranked.push_back({cnt, pat});
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const std::size_t keep = std::min(top_k, ranked.size());
    for (std::size_t i = 0; i < keep; ++i) {
      slot_of[g][ranked[i].second] = tracked[g].size();
      tracked[g].push_back({ranked[i].second, ranked[i].first, {}});
    }
  }

  const std::vector<std::size_t> reps = replicate_indices(total, 1000);
  for (int g = 0; g < 2; ++g) {
    for (auto& t : tracked[g]) t.rep_counts.assign(reps.size(), 0.0);
  }
  Rng rng(seed);
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Dataset sim = simulate_like(ds, draw_at(chains, reps[r]), rng);
    for (const SubjectRecord& s : sim.subjects) {
      const int g = s.is_case ? 1 : 0;
      const auto it = slot_of[g].find(s.brs);
      if (it != slot_of[g].end()) {
        tracked[g][it->second].rep_counts[r] += 1.0;
      }
    }
  }

  PatternPpc out;
  out.n_replicates_used = reps.size();
  for (int g = 0; g < 2; ++g) {
    auto& rows = (g == 1) ? out.case_rows : out.control_rows;
    for (auto& t : tracked[g]) {
      std::sort(t.rep_counts.begin(), t.rep_counts.end());
      PatternRow row;
      row.pattern = t.pattern;
      row.observed = t.observed;
      row.pred_lo = empirical_quantile(t.rep_counts, 0.025);
      row.pred_med = empirical_quantile(t.rep_counts, 0.50);
      row.pred_hi = empirical_quantile(t.rep_counts, 0.975);
      rows.push_back(std::move(row));
    }
  }
  return out;
}

namespace {

// Continuity-corrected log odds ratio for coordinates (j, l) within one
// group, plus a per-pathogen variation flag used for masking.
struct GroupLor {
  std::vector<double> lor;        // (j, l), j < l, packed
  std::vector<std::uint8_t> varies;
};

std::size_t pair_slot(std::size_t j, std::size_t l, std::size_t n_path) {
  // index of (j, l), j < l, in row-major upper-triangle packing
  return j * n_path - j * (j + 1) / 2 + (l - j - 1);
}

GroupLor group_lor(const Dataset& ds, bool cases) {
  const std::size_t n_path = ds.panel.n_pathogens();
  std::vector<std::size_t> n11(n_path * (n_path - 1) / 2, 0);
  std::vector<std::size_t> n1_(n_path, 0);
  std::size_t n_total = 0;
  for (const SubjectRecord& s : ds.subjects) {
    if (s.is_case != cases) continue;
    ++n_total;
    for (std::size_t j = 0; j < n_path; ++j) {
      if (!s.brs[j]) continue;
      ++n1_[j];
      for (std::size_t l = j + 1; l < n_path; ++l) {
        if (s.brs[l]) ++n11[pair_slot(j, l, n_path)];
      }
    }
  }
  GroupLor out;
  out.varies.resize(n_path);
  for (std::size_t j = 0; j < n_path; ++j) {
    out.varies[j] = n1_[j] > 0 && n1_[j] < n_total;
  }
  out.lor.resize(n11.size());
  for (std::size_t j = 0; j < n_path; ++j) {
    for (std::size_t l = j + 1; l < n_path; ++l) {
      const std::size_t slot = pair_slot(j, l, n_path);
      const double a = static_cast<double>(n11[slot]);
      const double b = static_cast<double>(n1_[j] - n11[slot]);
      const double c = static_cast<double>(n1_[l] - n11[slot]);
      const double d =
          static_cast<double>(n_total - n1_[j] - n1_[l] + n11[slot]);
      out.lor[slot] = std::log(((a + 0.5) * (d + 0.5)) /
                               ((b + 0.5) * (c + 0.5)));
    }
  }
  return out;
}

}  // namespace

SlorTable ppc_slor(const Dataset& ds, const ChainSet& chains,
                   std::uint64_t seed) {
  const std::size_t n_path = ds.panel.n_pathogens();
  const std::size_t total = chains.n_total_draws();
  if (total == 0) {
    throw std::invalid_argument("ppc_slor: no draws available");
  }
  const GroupLor obs_case = group_lor(ds, true);
  const GroupLor obs_ctrl = group_lor(ds, false);

  const std::size_t n_pairs = n_path * (n_path - 1) / 2;
  std::vector<double> sum[2], sumsq[2];
  for (int g = 0; g < 2; ++g) {
    sum[g].assign(n_pairs, 0.0);
    sumsq[g].assign(n_pairs, 0.0);
  }
  const std::vector<std::size_t> reps = replicate_indices(total, 1000);
  Rng rng(seed);
  for (const std::size_t flat : reps) {
    const Dataset sim = simulate_like(ds, draw_at(chains, flat), rng);
    const GroupLor rep_case = group_lor(sim, true);
    const GroupLor rep_ctrl = group_lor(sim, false);
    for (std::size_t s = 0; s < n_pairs; ++s) {
      sum[1][s] += rep_case.lor[s];
      sumsq[1][s] += rep_case.lor[s] * rep_case.lor[s];
      sum[0][s] += rep_ctrl.lor[s];
      sumsq[0][s] += rep_ctrl.lor[s] * rep_ctrl.lor[s];
    }
  }

  const double nr = static_cast<double>(reps.size());
  SlorTable table;
  table.n_path = n_path;
  table.n_replicates_used = reps.size();
  table.slor.assign(n_path * n_path, kNaN);
  table.pred_mean.assign(n_path * n_path, kNaN);
  table.pred_sd.assign(n_path * n_path, kNaN);
  table.defined.assign(n_path * n_path, 0);

  for (std::size_t j = 0; j < n_path; ++j) {
    for (std::size_t l = j + 1; l < n_path; ++l) {
      const std::size_t slot = pair_slot(j, l, n_path);
      for (int g = 0; g < 2; ++g) {
        const double mean = sum[g][slot] / nr;
        const double var =
            std::max((sumsq[g][slot] - nr * mean * mean) / (nr - 1.0), 0.0);
        const double sd = std::sqrt(var);
        const GroupLor& obs = (g == 1) ? obs_case : obs_ctrl;
        // cases in the lower triangle, controls in the upper
        const std::size_t cell =
            (g == 1) ? table.at(l, j) : table.at(j, l);
        table.pred_mean[cell] = mean;
        table.pred_sd[cell] = sd;
        const bool ok = obs.varies[j] && obs.varies[l] && sd > 0.0;
        if (ok) {
          table.slor[cell] = (obs.lor[slot] - mean) / sd;
          table.defined[cell] = 1;
        }
      }
    }
  }
  return table;
}

}  // namespace plcm
