// prediction.hpp -- individual-level etiology classification.
//
// Given a new case's bronze measurement vector, the cause posterior at fixed
// parameters is the mixture responsibility pi_j * f_j(m) normalized over
// causes; the predictive distribution averages that quantity over stored
// MCMC draws. The pairwise log relative probability R_jl and its expectation
// quantify how much discrimination the measurements add on top of the
// etiology prior.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "plcm/sampler.hpp"

namespace plcm {

struct EtiologyPrediction {
  std::vector<double> p_hat;      // posterior cause probabilities, sum 1
  std::size_t n_draws_used = 0;
};

/// Cause posterior at fixed parameters: normalize pi_j times the cause-j
/// bronze factor (computed in log space).
std::vector<double> plugin_cause_posterior(std::span<const std::uint8_t> m_star,
                                           const ModelParams& params);

/// Monte Carlo average of plugin_cause_posterior over every stored draw in
/// every chain. Throws std::invalid_argument on an empty ChainSet.
EtiologyPrediction predict_individual(std::span<const std::uint8_t> m_star,
                                      const ChainSet& chains);

/// Within-sample cause probabilities for case k (dataset case-row order),
/// from the sampler's accumulated assignment frequencies across chains.
std::vector<double> case_posterior_from_counts(const ChainSet& chains,
                                               std::size_t case_index);

/// R_jl: log pi_j/pi_l plus the two measurement log-ratio brackets at
/// coordinates j and l. Equals log(p_j/p_l) of plugin_cause_posterior.
double log_relative_probability(std::size_t j, std::size_t l,
                                std::span<const std::uint8_t> m_star,
                                const ModelParams& params);

/// Information divergence I(v1; v2) = v1 log(v1/v2) + (1-v1) log((1-v1)/(1-v2)),
/// nonnegative, zero iff v1 == v2; +infinity when v2 is degenerate at the
/// wrong endpoint.
double info_divergence(double v1, double v2);

/// E[R_jl] under true cause j: log(pi_j/pi_l) + I(theta_j; psi_j) +
/// I(psi_l; theta_l).
double expected_discrimination(std::size_t j, std::size_t l,
                               const ModelParams& params);

}  // namespace plcm
