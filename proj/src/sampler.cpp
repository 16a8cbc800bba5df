#include "plcm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace plcm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRateFloor = 1e-12;

inline double clamp_unit(double x) {
  return std::min(std::max(x, kRateFloor), 1.0 - kRateFloor);
}

void check_alignment(const Dataset& ds, const LatentAssignment& assign) {
  if (assign.causes.size() != ds.n_cases()) {
    throw std::invalid_argument(
        "latent assignment is not aligned with the dataset's case rows");
  }
}

// Latent-cause stage over all cases. Precomputes per-sweep log tables so a
// case costs O(J): the control-model log probability of the full bronze
// vector is accumulated once ("base"), then cause j swaps coordinate j from
// the false-positive rate to the true-positive rate. Requires interior
// bronze rates (guaranteed inside a chain, where rates are clamped draws).
void latent_stage(const Dataset& ds, const ModelParams& params,
                  LatentAssignment& assign, Rng& rng, SsSemantics mode) {
  const std::size_t n_path = params.pi.size();
  const std::size_t n_ss = params.theta_ss.size();
  std::vector<double> lpi(n_path), lpsi1(n_path), lpsi0(n_path),
      lth1(n_path), lth0(n_path), lss1(n_ss), lss0(n_ss);
  for (std::size_t j = 0; j < n_path; ++j) {
    lpi[j] = std::log(params.pi[j]);
    lpsi1[j] = std::log(params.psi_brs[j]);
    lpsi0[j] = std::log1p(-params.psi_brs[j]);
    lth1[j] = std::log(params.theta_brs[j]);
    lth0[j] = std::log1p(-params.theta_brs[j]);
  }
  for (std::size_t j = 0; j < n_ss; ++j) {
    lss1[j] = std::log(params.theta_ss[j]);
    lss0[j] = std::log1p(-params.theta_ss[j]);
  }

  std::vector<double> w(n_path);
  const auto& rows = ds.case_rows();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SubjectRecord& s = ds.subjects[rows[k]];
    if (s.has_gs && s.gs) {
      assign.causes[k] = s.gs_cause();
      continue;
    }
    double base = 0.0;
    for (std::size_t l = 0; l < n_path; ++l) {
      base += s.brs[l] ? lpsi1[l] : lpsi0[l];
    }
    for (std::size_t j = 0; j < n_path; ++j) {
      w[j] = lpi[j] + base +
             (s.brs[j] ? lth1[j] - lpsi1[j] : lth0[j] - lpsi0[j]);
    }
    if (s.has_ss && s.ss) {
      const auto& mss = *s.ss;
      std::size_t pos = 0;
      std::size_t n_pos = 0;
      for (std::size_t l = 0; l < n_ss; ++l) {
        if (mss[l]) {
          pos = l;
          ++n_pos;
        }
      }
      if (n_pos == 0) {
        for (std::size_t j = 0; j < n_ss; ++j) w[j] += lss0[j];
        // causes outside the silver panel: factor 1 in both modes
      } else {
        for (std::size_t j = 0; j < n_path; ++j) {
          if (j < n_ss) {
            w[j] = (n_pos == 1 && j == pos) ? w[j] + lss1[j] : kNegInf;
          } else if (mode == SsSemantics::strict) {
            w[j] = kNegInf;
          }
        }
      }
    }
    assign.causes[k] = static_cast<std::size_t>(rng.categorical_log(w));
  }
}

struct SweepCounts {
  // per pathogen j: off-cause positives / trials, on-cause bronze positives /
  // trials, on-cause silver positives / trials, assignment totals
  std::vector<std::size_t> fpr_pos, fpr_n, tpr_pos, tpr_n, ss_pos, ss_n;
};

SweepCounts count_sweep(const Dataset& ds, const LatentAssignment& assign) {
  const std::size_t n_path = ds.panel.n_pathogens();
  const std::size_t n_ss = ds.panel.n_ss;
  SweepCounts c;
  c.fpr_pos.assign(n_path, 0);
  c.fpr_n.assign(n_path, 0);
  c.tpr_pos.assign(n_path, 0);
  c.tpr_n.assign(n_path, 0);
  c.ss_pos.assign(n_ss, 0);
  c.ss_n.assign(n_ss, 0);
  const auto& rows = ds.case_rows();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SubjectRecord& s = ds.subjects[rows[k]];
    const std::size_t cause = assign.causes[k];
    for (std::size_t j = 0; j < n_path; ++j) {
      if (j == cause) {
        ++c.tpr_n[j];
        c.tpr_pos[j] += s.brs[j] != 0;
      } else {
        ++c.fpr_n[j];
        c.fpr_pos[j] += s.brs[j] != 0;
      }
    }
    if (s.has_ss && s.ss && cause < n_ss) {
      ++c.ss_n[cause];
      c.ss_pos[cause] += (*s.ss)[cause] != 0;
    }
  }
  for (const SubjectRecord& s : ds.subjects) {
    if (s.is_case) continue;
    for (std::size_t j = 0; j < n_path; ++j) {
      ++c.fpr_n[j];
      c.fpr_pos[j] += s.brs[j] != 0;
    }
  }
  return c;
}

}  // namespace

std::size_t ChainSet::n_total_draws() const {
  std::size_t n = 0;
  for (const auto& c : chains) n += c.draws.size();
  return n;
}

std::uint64_t ChainSet::iteration_of(std::size_t t) const {
  return options.n_burnin + (static_cast<std::uint64_t>(t) + 1) * options.thin;
}

BetaShape fpr_shape(const Dataset& ds, const LatentAssignment& assign,
                    const HyperPriors& hyper, std::size_t j) {
  check_alignment(ds, assign);
  std::size_t successes = 0;
  std::size_t trials = 0;
  const auto& rows = ds.case_rows();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (assign.causes[k] == j) continue;
    ++trials;
    successes += ds.subjects[rows[k]].brs[j] != 0;
  }
  for (const SubjectRecord& s : ds.subjects) {
    if (s.is_case) continue;
    ++trials;
    successes += s.brs[j] != 0;
  }
  return {hyper.b[j].alpha + static_cast<double>(successes),
          hyper.b[j].beta + static_cast<double>(trials - successes)};
}

BetaShape tpr_brs_shape(const Dataset& ds, const LatentAssignment& assign,
                        const HyperPriors& hyper, std::size_t j) {
  check_alignment(ds, assign);
  std::size_t successes = 0;
  std::size_t trials = 0;
  const auto& rows = ds.case_rows();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (assign.causes[k] != j) continue;
    ++trials;
    successes += ds.subjects[rows[k]].brs[j] != 0;
  }
  return {hyper.c[j].alpha + static_cast<double>(successes),
          hyper.c[j].beta + static_cast<double>(trials - successes)};
}

BetaShape tpr_ss_shape(const Dataset& ds, const LatentAssignment& assign,
                       const HyperPriors& hyper, std::size_t j) {
  check_alignment(ds, assign);
  if (j >= ds.panel.n_ss) {
    throw std::invalid_argument(
        "tpr_ss_shape: pathogen has no silver-standard assay");
  }
  std::size_t successes = 0;
  std::size_t trials = 0;
  const auto& rows = ds.case_rows();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const SubjectRecord& s = ds.subjects[rows[k]];
    if (assign.causes[k] != j || !s.has_ss || !s.ss) continue;
    ++trials;
    successes += (*s.ss)[j] != 0;
  }
  return {hyper.d[j].alpha + static_cast<double>(successes),
          hyper.d[j].beta + static_cast<double>(trials - successes)};
}

std::vector<double> etiology_weights(const LatentAssignment& assign,
                                     const HyperPriors& hyper) {
  std::vector<std::size_t> counts(hyper.a.size(), 0);
  for (std::size_t cause : assign.causes) {
    if (cause >= counts.size()) {
      throw std::invalid_argument("etiology_weights: cause index out of range");
    }
    ++counts[cause];
  }
  std::vector<double> w = hyper.a;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] += static_cast<double>(counts[j]);
  }
  return w;
}

std::vector<double> latent_cause_logweights(const SubjectRecord& rec,
                                            const ModelParams& params,
                                            SsSemantics mode) {
  const std::size_t n_path = params.pi.size();
  const std::size_t n_ss = params.theta_ss.size();
  std::vector<double> w(n_path);
  for (std::size_t j = 0; j < n_path; ++j) {
    w[j] = std::log(params.pi[j]) + case_brs_cause_logfactor(rec.brs, j, params);
    if (rec.has_ss && rec.ss) {
      w[j] += case_ss_cause_logfactor(*rec.ss, j, params.theta_ss, n_ss, mode);
    }
  }
  return w;
}

std::size_t sample_latent_cause(const SubjectRecord& rec,
                                const ModelParams& params, SsSemantics mode,
                                Rng& rng) {
  if (rec.has_gs && rec.gs) return rec.gs_cause();
  const std::vector<double> w = latent_cause_logweights(rec, params, mode);
  const bool feasible =
      std::any_of(w.begin(), w.end(), [](double x) { return std::isfinite(x); });
  if (!feasible) {
    throw std::runtime_error("sample_latent_cause: record '" + rec.id +
                             "' has zero probability under every cause");
  }
  return static_cast<std::size_t>(rng.categorical_log(w));
}

double sample_fpr(std::size_t j, const Dataset& ds,
                  const LatentAssignment& assign, const HyperPriors& hyper,
                  Rng& rng) {
  const BetaShape s = fpr_shape(ds, assign, hyper, j);
  return rng.beta(s.alpha, s.beta);
}

double sample_tpr_brs(std::size_t j, const Dataset& ds,
                      const LatentAssignment& assign, const HyperPriors& hyper,
                      Rng& rng) {
  const BetaShape s = tpr_brs_shape(ds, assign, hyper, j);
  return rng.beta(s.alpha, s.beta);
}

double sample_tpr_ss(std::size_t j, const Dataset& ds,
                     const LatentAssignment& assign, const HyperPriors& hyper,
                     Rng& rng) {
  const BetaShape s = tpr_ss_shape(ds, assign, hyper, j);
  return rng.beta(s.alpha, s.beta);
}

std::vector<double> sample_etiology(const LatentAssignment& assign,
                                    const HyperPriors& hyper, Rng& rng) {
  const std::vector<double> w = etiology_weights(assign, hyper);
  return rng.dirichlet(w);
}

void init_chain_state(const Dataset& ds, const HyperPriors& hyper,
                      ModelParams& params, LatentAssignment& assign, Rng& rng,
                      SsSemantics mode) {
  const std::size_t n_path = ds.panel.n_pathogens();
  const std::size_t n_ss = ds.panel.n_ss;
  const double a_total =
      std::accumulate(hyper.a.begin(), hyper.a.end(), 0.0);
  params.pi.resize(n_path);
  params.theta_brs.resize(n_path);
  params.psi_brs.resize(n_path);
  params.theta_ss.resize(n_ss);
  for (std::size_t j = 0; j < n_path; ++j) {
    params.pi[j] = hyper.a[j] / a_total;
    params.theta_brs[j] =
        clamp_unit(hyper.c[j].alpha / (hyper.c[j].alpha + hyper.c[j].beta));
    params.psi_brs[j] =
        clamp_unit(hyper.b[j].alpha / (hyper.b[j].alpha + hyper.b[j].beta));
  }
  for (std::size_t j = 0; j < n_ss; ++j) {
    params.theta_ss[j] =
        clamp_unit(hyper.d[j].alpha / (hyper.d[j].alpha + hyper.d[j].beta));
  }
  assign.causes.assign(ds.n_cases(), 0);
  latent_stage(ds, params, assign, rng, mode);
}

void gibbs_sweep(const Dataset& ds, const HyperPriors& hyper,
                 ModelParams& params, LatentAssignment& assign, Rng& rng,
                 SsSemantics mode) {
  check_alignment(ds, assign);
  latent_stage(ds, params, assign, rng, mode);
  const SweepCounts counts = count_sweep(ds, assign);
  const std::size_t n_path = ds.panel.n_pathogens();
  const std::size_t n_ss = ds.panel.n_ss;
  for (std::size_t j = 0; j < n_path; ++j) {
    const double a = hyper.b[j].alpha + static_cast<double>(counts.fpr_pos[j]);
    const double b = hyper.b[j].beta +
                     static_cast<double>(counts.fpr_n[j] - counts.fpr_pos[j]);
    params.psi_brs[j] = clamp_unit(rng.beta(a, b));
  }
  for (std::size_t j = 0; j < n_path; ++j) {
    const double a = hyper.c[j].alpha + static_cast<double>(counts.tpr_pos[j]);
    const double b = hyper.c[j].beta +
                     static_cast<double>(counts.tpr_n[j] - counts.tpr_pos[j]);
    params.theta_brs[j] = clamp_unit(rng.beta(a, b));
  }
  for (std::size_t j = 0; j < n_ss; ++j) {
    const double a = hyper.d[j].alpha + static_cast<double>(counts.ss_pos[j]);
    const double b = hyper.d[j].beta +
                     static_cast<double>(counts.ss_n[j] - counts.ss_pos[j]);
    params.theta_ss[j] = clamp_unit(rng.beta(a, b));
  }
  params.pi = sample_etiology(assign, hyper, rng);
}

ChainDraws run_chain(const Dataset& ds, const HyperPriors& hyper,
                     const McmcOptions& opts, std::uint64_t chain_seed) {
  if (opts.n_keep == 0 || opts.thin == 0) {
    throw std::invalid_argument("run_chain: n_keep and thin must be positive");
  }
  Rng rng(chain_seed);
  ModelParams params;
  LatentAssignment assign;
  init_chain_state(ds, hyper, params, assign, rng, opts.ss_mode);

  const std::size_t n_path = ds.panel.n_pathogens();
  ChainDraws out;
  out.seed = chain_seed;
  out.n_cases = ds.n_cases();
  out.cause_counts.assign(out.n_cases * n_path, 0);
  out.draws.reserve(opts.n_keep / opts.thin);
  for (std::size_t i = 0; i < opts.n_burnin; ++i) {
    gibbs_sweep(ds, hyper, params, assign, rng, opts.ss_mode);
  }
  for (std::size_t i = 1; i <= opts.n_keep; ++i) {
    gibbs_sweep(ds, hyper, params, assign, rng, opts.ss_mode);
    if (i % opts.thin == 0) {
      out.draws.push_back(params);
      for (std::size_t k = 0; k < out.n_cases; ++k) {
        ++out.cause_counts[k * n_path + assign.causes[k]];
      }
    }
  }
  return out;
}

ChainSet run_chains(const Dataset& ds, const HyperPriors& hyper,
                    const McmcOptions& opts) {
  if (opts.n_chains == 0 || opts.n_keep == 0 || opts.thin == 0) {
    throw std::invalid_argument("run_chains: counts must be positive");
  }
  const ValidationReport report = validate_dataset(ds);
  if (!report.pass()) {
    throw std::invalid_argument("run_chains: dataset failed validation: " +
                                report.violations.front().rule);
  }
  std::vector<std::future<ChainDraws>> futures;
  futures.reserve(opts.n_chains);
  for (std::size_t k = 0; k < opts.n_chains; ++k) {
    futures.push_back(std::async(std::launch::async, [&ds, &hyper, &opts, k] {
      return run_chain(ds, hyper, opts, opts.seed + k);
    }));
  }
  ChainSet cs;
  cs.panel = ds.panel;
  cs.options = opts;
  cs.chains.reserve(opts.n_chains);
  for (auto& f : futures) cs.chains.push_back(f.get());
  return cs;
}

std::vector<double> flatten_params(const ModelParams& params) {
  std::vector<double> out;
  out.reserve(params.pi.size() * 3 + params.theta_ss.size());
  out.insert(out.end(), params.pi.begin(), params.pi.end());
  out.insert(out.end(), params.theta_brs.begin(), params.theta_brs.end());
  out.insert(out.end(), params.psi_brs.begin(), params.psi_brs.end());
  out.insert(out.end(), params.theta_ss.begin(), params.theta_ss.end());
  return out;
}

std::vector<std::string> parameter_labels(const PathogenPanel& panel) {
  std::vector<std::string> labels;
  labels.reserve(panel.n_pathogens() * 3 + panel.n_ss);
  for (const auto& n : panel.names) labels.push_back("pi_" + n);
  for (const auto& n : panel.names) labels.push_back("theta_brs_" + n);
  for (const auto& n : panel.names) labels.push_back("psi_brs_" + n);
  for (std::size_t j = 0; j < panel.n_ss; ++j) {
    labels.push_back("theta_ss_" + panel.names[j]);
  }
  return labels;
}

}  // namespace plcm
