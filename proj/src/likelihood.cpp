#include "plcm/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace plcm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log p or log(1-p) depending on the observed bit; p in {0,1} yields -inf
// when contradicted and 0 when confirmed.
inline double log_bernoulli(std::uint8_t bit, double p) {
  return bit ? std::log(p) : std::log1p(-p);
}

double log_sum_exp(std::span<const double> logs) {
  double m = kNegInf;
  for (double l : logs) m = std::max(m, l);
  if (!std::isfinite(m)) return kNegInf;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - m);
  return m + std::log(s);
}

}  // namespace

bool LogLik::is_zero_prob() const { return value == kNegInf; }

LogLik control_brs_loglik(std::span<const std::uint8_t> m,
                          std::span<const double> psi_brs) {
  double ll = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) ll += log_bernoulli(m[j], psi_brs[j]);
  return {ll};
}

double case_brs_cause_logfactor(std::span<const std::uint8_t> m, std::size_t cause,
                                const ModelParams& params) {
  double lf = 0.0;
  for (std::size_t l = 0; l < m.size(); ++l) {
    lf += log_bernoulli(m[l], l == cause ? params.theta_brs[l] : params.psi_brs[l]);
  }
  return lf;
}

LogLik case_brs_loglik(std::span<const std::uint8_t> m, const ModelParams& params) {
  const std::size_t n_path = params.pi.size();
  std::vector<double> terms(n_path);
  for (std::size_t j = 0; j < n_path; ++j) {
    terms[j] = std::log(params.pi[j]) + case_brs_cause_logfactor(m, j, params);
  }
  return {log_sum_exp(terms)};
}

double case_ss_cause_logfactor(std::span<const std::uint8_t> m, std::size_t cause,
                               std::span<const double> theta_ss, std::size_t n_ss,
                               SsSemantics mode) {
  if (cause >= n_ss) {
    if (mode == SsSemantics::appendix) return 0.0;  // SS uninformative
    for (std::size_t l = 0; l < n_ss; ++l)
      if (m[l]) return kNegInf;  // perfect specificity forces all zeros
    return 0.0;
  }
  for (std::size_t l = 0; l < n_ss; ++l)
    if (l != cause && m[l]) return kNegInf;
  return log_bernoulli(m[cause], theta_ss[cause]);
}

LogLik case_ss_loglik(std::span<const std::uint8_t> m, std::span<const double> pi,
                      std::span<const double> theta_ss, SsSemantics mode) {
  const std::size_t n_ss = theta_ss.size();
  std::size_t positives = 0;
  for (std::size_t l = 0; l < n_ss; ++l) positives += (m[l] != 0);
  if (positives >= 2) return {kNegInf};

  std::vector<double> terms(pi.size());
  for (std::size_t j = 0; j < pi.size(); ++j) {
    terms[j] =
        std::log(pi[j]) + case_ss_cause_logfactor(m, j, theta_ss, n_ss, mode);
  }
  return {log_sum_exp(terms)};
}

LogLik case_gs_loglik(std::span<const std::uint8_t> m, std::span<const double> pi) {
  std::size_t positives = 0;
  std::size_t idx = 0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j]) {
      idx = j;
      ++positives;
    }
  }
  if (positives != 1) return {kNegInf};
  return {std::log(pi[idx])};
}

LogLik total_loglik(const Dataset& ds, const ModelParams& params,
                    SsSemantics mode) {
  LogLik total{0.0};
  for (const auto& s : ds.subjects) {
    if (!s.is_case) {
      total += control_brs_loglik(s.brs, params.psi_brs);
      continue;
    }
    total += case_brs_loglik(s.brs, params);
    if (s.ss) total += case_ss_loglik(*s.ss, params.pi, params.theta_ss, mode);
    if (s.gs) total += case_gs_loglik(*s.gs, params.pi);
  }
  return total;
}

double case_positive_rate(double pi_j, double theta_j, double psi_j) {
  return pi_j * theta_j + (1.0 - pi_j) * psi_j;
}

}  // namespace plcm
