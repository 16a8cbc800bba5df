// simulate.hpp -- synthetic data generation and replicate study driver.
//
// simulate_dataset reads the model forward: each case draws a cause from pi,
// a bronze vector with the true-positive rate at the cause coordinate and
// false-positive rates elsewhere, an optional one-hot gold vector, and an
// optional silver vector that can only be positive at the cause. Controls
// draw bronze vectors from the false-positive rates alone.
//
// replicate_study loops simulate -> fit -> summarize and reports bias,
// credible-interval coverage, and (for 3-pathogen panels) credible-region
// area and coverage for three analysis arms: bronze only, bronze + gold,
// and gold only (the latter fit in closed form as a conjugate Dirichlet).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plcm/model.hpp"
#include "plcm/rng.hpp"
#include "plcm/sampler.hpp"

namespace plcm {

struct SimTruth {
  ModelParams params;
  std::size_t n1 = 500;      // cases
  std::size_t n0 = 500;      // controls
  double delta_frac = 0.0;   // fraction of cases with gold-standard data
  double ss_frac = 0.0;      // fraction of cases with silver-standard data
  std::uint64_t seed = 1;
};

/// Generates a dataset from the truth. The gold and silver subsets are drawn
/// completely at random (seeded shuffles); ids are "case-0001", "ctrl-0001",
/// and so on. Deterministic given (truth, panel).
Dataset simulate_dataset(const SimTruth& truth, const PathogenPanel& panel);

/// Redraws causes and all measurements for every subject under `params`,
/// keeping ids, case/control status, and availability flags fixed. This is
/// the generative path used for posterior predictive replicates.
Dataset simulate_like(const Dataset& ds, const ModelParams& params, Rng& rng);

/// Copy of the dataset with gold-standard data removed (bronze-only and
/// bronze+silver analyses).
Dataset strip_gold(const Dataset& ds);

struct ArmReport {
  std::string arm;  // "brs_only", "brs_gs", or "gs_only"
  // per replicate
  std::vector<std::vector<double>> post_mean;       // n_replicates x J
  std::vector<std::vector<std::uint8_t>> ci_cover;  // 95% equal-tail, per comp.
  std::vector<std::vector<double>> pi_bgr;          // MCMC arms, multi-chain only
  std::vector<double> region_area;                  // 3-pathogen panels only
  std::vector<std::uint8_t> region_cover;           //   "
  // aggregates over replicates
  std::vector<double> mean_bias;   // mean(post_mean - truth) per component
  std::vector<double> coverage;    // CI coverage rate per component
  double mean_region_area = 0.0;   // NaN when regions are unavailable
  double region_coverage = 0.0;    //   "
};

struct StudyReport {
  SimTruth truth;
  std::size_t n_replicates = 0;
  McmcOptions fit_options;
  std::vector<ArmReport> arms;  // brs_only, brs_gs, gs_only
};

/// Runs `n_replicates` rounds of simulate -> fit -> summarize. Replicate r
/// simulates with seed truth.seed + r and fits with seed
/// fit_options.seed + 1000*r (chains add their index on top). Uniform-prior
/// hyperparameters are used throughout.
StudyReport replicate_study(const SimTruth& truth, const PathogenPanel& panel,
                            std::size_t n_replicates,
                            const McmcOptions& fit_options);

}  // namespace plcm
