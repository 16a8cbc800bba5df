#include "plcm/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "plcm/likelihood.hpp"

namespace plcm {

std::vector<double> plugin_cause_posterior(std::span<const std::uint8_t> m_star,
                                           const ModelParams& params) {
  const std::size_t n_path = params.pi.size();
  if (m_star.size() != n_path) {
    throw std::invalid_argument(
        "plugin_cause_posterior: measurement length does not match panel");
  }
  std::vector<double> logw(n_path);
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n_path; ++j) {
    logw[j] =
        std::log(params.pi[j]) + case_brs_cause_logfactor(m_star, j, params);
    m = std::max(m, logw[j]);
  }
  if (!std::isfinite(m)) {
    throw std::runtime_error(
        "plugin_cause_posterior: pattern has zero probability under every "
        "cause");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n_path; ++j) {
    logw[j] = std::exp(logw[j] - m);
    total += logw[j];
  }
  for (auto& x : logw) x /= total;
  return logw;
}

EtiologyPrediction predict_individual(std::span<const std::uint8_t> m_star,
                                      const ChainSet& chains) {
  const std::size_t n_total = chains.n_total_draws();
  if (n_total == 0) {
    throw std::invalid_argument("predict_individual: no draws available");
  }
  const std::size_t n_path = chains.panel.n_pathogens();
  EtiologyPrediction pred;
  pred.p_hat.assign(n_path, 0.0);
  for (const ChainDraws& chain : chains.chains) {
    for (const ModelParams& draw : chain.draws) {
      const std::vector<double> p = plugin_cause_posterior(m_star, draw);
      for (std::size_t j = 0; j < n_path; ++j) pred.p_hat[j] += p[j];
    }
  }
  for (auto& x : pred.p_hat) x /= static_cast<double>(n_total);
  pred.n_draws_used = n_total;
  return pred;
}

std::vector<double> case_posterior_from_counts(const ChainSet& chains,
                                               std::size_t case_index) {
  const std::size_t n_path = chains.panel.n_pathogens();
  std::vector<double> p(n_path, 0.0);
  double total = 0.0;
  for (const ChainDraws& chain : chains.chains) {
    if (case_index >= chain.n_cases) {
      throw std::invalid_argument(
          "case_posterior_from_counts: case index out of range");
    }
    for (std::size_t j = 0; j < n_path; ++j) {
      const double n = chain.cause_counts[case_index * n_path + j];
      p[j] += n;
      total += n;
    }
  }
  if (total == 0.0) {
    throw std::invalid_argument(
        "case_posterior_from_counts: no assignment draws recorded");
  }
  for (auto& x : p) x /= total;
  return p;
}

double log_relative_probability(std::size_t j, std::size_t l,
                                std::span<const std::uint8_t> m_star,
                                const ModelParams& params) {
  if (j == l) {
    throw std::invalid_argument(
        "log_relative_probability: cause indices must differ");
  }
  const double pi_term = std::log(params.pi[j] / params.pi[l]);
  const double mj = m_star[j] ? 1.0 : 0.0;
  const double ml = m_star[l] ? 1.0 : 0.0;
  const double j_term =
      mj * std::log(params.theta_brs[j] / params.psi_brs[j]) +
      (1.0 - mj) *
          std::log((1.0 - params.theta_brs[j]) / (1.0 - params.psi_brs[j]));
  const double l_term =
      ml * std::log(params.psi_brs[l] / params.theta_brs[l]) +
      (1.0 - ml) *
          std::log((1.0 - params.psi_brs[l]) / (1.0 - params.theta_brs[l]));
  return pi_term + j_term + l_term;
}

double info_divergence(double v1, double v2) {
  if (!(v1 >= 0.0) || !(v1 <= 1.0) || !(v2 >= 0.0) || !(v2 <= 1.0)) {
    throw std::invalid_argument(
        "info_divergence: arguments must lie in [0, 1]");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  double total = 0.0;
  if (v1 > 0.0) {
    if (v2 == 0.0) return inf;
    total += v1 * std::log(v1 / v2);
  }
  if (v1 < 1.0) {
    if (v2 == 1.0) return inf;
    total += (1.0 - v1) * std::log((1.0 - v1) / (1.0 - v2));
  }
  // clip tiny negative rounding residue; the divergence is nonnegative
  return std::max(total, 0.0);
}

double expected_discrimination(std::size_t j, std::size_t l,
                               const ModelParams& params) {
  if (j == l) {
    throw std::invalid_argument(
        "expected_discrimination: cause indices must differ");
  }
  return std::log(params.pi[j] / params.pi[l]) +
         info_divergence(params.theta_brs[j], params.psi_brs[j]) +
         info_divergence(params.psi_brs[l], params.theta_brs[l]);
}

}  // namespace plcm
