// sampler.hpp -- data-augmented Gibbs sampler for the case-control latent
// cause model, plus the multi-chain driver.
//
// One sweep updates, in fixed order: latent causes for every case, then the
// false-positive rates, bronze true-positive rates, silver true-positive
// rates, and finally the etiology simplex. Each conditional is conjugate
// (categorical / Beta / Dirichlet); the shape computations are exposed
// separately from the draws so tests can verify the counting logic exactly.
//
// Chain k of a run seeded with `seed` uses its own generator Rng(seed + k);
// chains share nothing but the immutable dataset, so results are
// bit-reproducible regardless of scheduling.

#pragma once

#include <cstdint>
#include <vector>

#include "plcm/likelihood.hpp"
#include "plcm/model.hpp"
#include "plcm/priors.hpp"
#include "plcm/rng.hpp"

namespace plcm {

struct McmcOptions {
  std::size_t n_burnin = 10000;
  std::size_t n_keep = 50000;  // post-burnin sweeps; n_keep/thin draws kept
  std::size_t n_chains = 3;
  std::size_t thin = 1;
  std::uint64_t seed = 1;
  SsSemantics ss_mode = SsSemantics::strict;
};

struct ChainDraws {
  std::uint64_t seed = 0;  // generator seed used by this chain
  std::vector<ModelParams> draws;
  // Per-case assignment frequencies: cause_counts[k * J + j] counts the kept
  // sweeps in which case k (in dataset case-row order) was assigned cause j.
  std::vector<std::uint32_t> cause_counts;
  std::size_t n_cases = 0;
};

struct ChainSet {
  PathogenPanel panel;
  McmcOptions options;
  std::vector<ChainDraws> chains;

  std::size_t n_total_draws() const;
  /// Absolute sweep index of kept draw t within any chain (1-based sweeps).
  std::uint64_t iteration_of(std::size_t t) const;
};

// --- conjugate conditional shapes (exposed for exact-count verification) ---

/// False-positive rate conditional: successes are positives at j among
/// off-cause cases plus all controls.
BetaShape fpr_shape(const Dataset& ds, const LatentAssignment& assign,
                    const HyperPriors& hyper, std::size_t j);

/// Bronze true-positive rate conditional: successes are positives at j among
/// cases assigned cause j.
BetaShape tpr_brs_shape(const Dataset& ds, const LatentAssignment& assign,
                        const HyperPriors& hyper, std::size_t j);

/// Silver true-positive rate conditional: as tpr_brs_shape but restricted to
/// cases with silver measurements. Requires j < panel.n_ss().
BetaShape tpr_ss_shape(const Dataset& ds, const LatentAssignment& assign,
                       const HyperPriors& hyper, std::size_t j);

/// Dirichlet weights a_j + (number of cases assigned cause j).
std::vector<double> etiology_weights(const LatentAssignment& assign,
                                     const HyperPriors& hyper);

// --- single-site draws ---

/// Unnormalized log weights over causes for one case record: log pi_j plus
/// the bronze factor plus (if silver data is present) the silver factor.
/// The silver panel size is params.theta_ss.size(). Gold-standard records
/// are handled by sample_latent_cause, not here.
std::vector<double> latent_cause_logweights(const SubjectRecord& rec,
                                            const ModelParams& params,
                                            SsSemantics mode);

/// Draws a cause index in 0..J-1. A gold-standard record returns its
/// measured cause deterministically. Throws std::runtime_error if every
/// cause has zero weight (impossible record).
std::size_t sample_latent_cause(const SubjectRecord& rec,
                                const ModelParams& params, SsSemantics mode,
                                Rng& rng);

double sample_fpr(std::size_t j, const Dataset& ds,
                  const LatentAssignment& assign, const HyperPriors& hyper,
                  Rng& rng);
double sample_tpr_brs(std::size_t j, const Dataset& ds,
                      const LatentAssignment& assign, const HyperPriors& hyper,
                      Rng& rng);
double sample_tpr_ss(std::size_t j, const Dataset& ds,
                     const LatentAssignment& assign, const HyperPriors& hyper,
                     Rng& rng);
std::vector<double> sample_etiology(const LatentAssignment& assign,
                                    const HyperPriors& hyper, Rng& rng);

// --- full kernel ---

/// Initial state: pi at the prior mean, rates at their prior means, latent
/// causes drawn once from the resulting conditional.
void init_chain_state(const Dataset& ds, const HyperPriors& hyper,
                      ModelParams& params, LatentAssignment& assign, Rng& rng,
                      SsSemantics mode);

/// One full Gibbs sweep (causes, fpr, bronze tpr, silver tpr, etiology),
/// updating params and assign in place. Requires interior rate parameters.
void gibbs_sweep(const Dataset& ds, const HyperPriors& hyper,
                 ModelParams& params, LatentAssignment& assign, Rng& rng,
                 SsSemantics mode);

/// Runs one chain to completion; deterministic given (ds, hyper, opts,
/// chain_seed).
ChainDraws run_chain(const Dataset& ds, const HyperPriors& hyper,
                     const McmcOptions& opts, std::uint64_t chain_seed);

/// Runs opts.n_chains chains concurrently with seeds opts.seed + k and
/// collates them in chain-index order.
ChainSet run_chains(const Dataset& ds, const HyperPriors& hyper,
                    const McmcOptions& opts);

// --- parameter flattening (shared by diagnostics and persistence) ---

/// Canonical scalar order: pi (J), theta_brs (J), psi_brs (J), theta_ss (J').
std::vector<double> flatten_params(const ModelParams& params);

/// Labels matching flatten_params, e.g. "pi_HINF", "theta_brs_HINF", ...
std::vector<std::string> parameter_labels(const PathogenPanel& panel);

}  // namespace plcm
