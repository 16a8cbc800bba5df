// diagnostics.hpp -- convergence monitoring and model criticism.
//
// Convergence: corrected potential scale reduction factor (between/within
// chain variance ratio with the degrees-of-freedom adjustment), sample
// autocorrelation, and an effective-sample-size estimate from the initial
// positive sequence of autocovariance pairs.
//
// Criticism: posterior predictive checks that re-simulate datasets of the
// observed size and composition from stored draws, summarized as pattern
// frequency intervals and pairwise standardized log odds ratios (SLOR).
// Positive SLOR means the observed association exceeds what the fitted model
// predicts.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "plcm/model.hpp"
#include "plcm/sampler.hpp"

namespace plcm {

/// Linear-interpolation quantile of an ascending-sorted sample, p in [0, 1].
double empirical_quantile(std::span<const double> sorted, double p);

/// Corrected potential scale reduction factor over >= 2 chains of scalar
/// draws (each >= 10 long; unequal lengths are truncated to the shortest).
/// Returns NaN for across-the-board constant chains.
double bgr_statistic(const std::vector<std::vector<double>>& chains);

/// Biased-normalized sample autocorrelation out to max_lag inclusive; entry
/// 0 is 1. A constant series yields NaN entries (undefined, not an error).
std::vector<double> autocorrelation(std::span<const double> draws,
                                    std::size_t max_lag);

/// Effective sample size from the initial positive sequence of summed
/// autocovariance pairs. NaN for a constant series.
double effective_sample_size(std::span<const double> draws);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q975 = 0.0;
  double bgr = 0.0;  // NaN when fewer than 2 chains
  double ess = 0.0;  // summed across chains
};

struct PosteriorSummary {
  std::vector<ParamSummary> rows;  // order of parameter_labels(panel)
};

PosteriorSummary posterior_summary(const ChainSet& chains);

struct PatternRow {
  std::vector<std::uint8_t> pattern;  // bronze measurement vector
  std::size_t observed = 0;
  double pred_lo = 0.0;   // 2.5% predictive quantile of the count
  double pred_med = 0.0;  // 50%
  double pred_hi = 0.0;   // 97.5%
};

struct PatternPpc {
  std::vector<PatternRow> case_rows;     // ranked by observed count
  std::vector<PatternRow> control_rows;
  std::size_t n_replicates_used = 0;
};

/// Observed bronze pattern counts vs. posterior predictive intervals, cases
/// and controls separately, top_k patterns each by observed frequency.
/// Predictive replicates are simulated from min(1000, stored draws) draws
/// subsampled evenly; deterministic given `seed`.
PatternPpc ppc_pattern_frequencies(const Dataset& ds, const ChainSet& chains,
                                   std::size_t top_k, std::uint64_t seed);

struct SlorTable {
  std::size_t n_path = 0;
  // Row-major J x J: case pairs in the lower triangle (row > col), control
  // pairs in the upper triangle (row < col), diagonal undefined.
  std::vector<double> slor;
  std::vector<double> pred_mean;      // predictive mean of the pair's LOR
  std::vector<double> pred_sd;        // predictive SD of the pair's LOR
  std::vector<std::uint8_t> defined;  // 0: masked (diagonal or no variation)
  std::size_t n_replicates_used = 0;

  std::size_t at(std::size_t r, std::size_t c) const { return r * n_path + c; }
};

/// Pairwise standardized log odds ratios with a +0.5 continuity correction
/// on every 2x2 cell. Pairs involving a pathogen with no observed variation
/// in that group are flagged undefined.
SlorTable ppc_slor(const Dataset& ds, const ChainSet& chains,
                   std::uint64_t seed);

}  // namespace plcm
