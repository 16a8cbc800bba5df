// likelihood.hpp -- measurement-model likelihood components.
//
// All values are carried on the log scale; log(0) = -inf is a legal value for
// zero-probability configurations (e.g. a boundary rate contradicted by an
// observation) and must propagate, never throw.

#pragma once

#include <span>

#include "plcm/model.hpp"

namespace plcm {

struct LogLik {
  double value = 0.0;
  bool is_zero_prob() const;
  LogLik& operator+=(LogLik o) {
    value += o.value;
    return *this;
  }
};

// The silver-standard factor for causes outside the SS panel is ambiguous:
// under the generative reading (`strict`, the default) a cause without an SS
// assay forces an all-zero SS vector through perfect specificity; under the
// full-conditional reading (`appendix`) SS data says nothing about such
// causes. Both are implemented; `strict` keeps the sampler coherent with the
// simulator.
enum class SsSemantics { strict, appendix };

/// log Pr(bronze vector | control), a product of independent Bernoulli(psi_j).
LogLik control_brs_loglik(std::span<const std::uint8_t> m,
                          std::span<const double> psi_brs);

/// log factor of the bronze vector for a case with latent cause j:
/// theta_j at coordinate j, psi elsewhere.
double case_brs_cause_logfactor(std::span<const std::uint8_t> m, std::size_t cause,
                                const ModelParams& params);

/// log Pr(bronze vector | case) = log sum_j pi_j * exp(cause-j factor),
/// evaluated with a log-sum-exp over the J mixture terms.
LogLik case_brs_loglik(std::span<const std::uint8_t> m, const ModelParams& params);

/// log factor of the SS vector for a case with latent cause j, per `mode`.
double case_ss_cause_logfactor(std::span<const std::uint8_t> m, std::size_t cause,
                               std::span<const double> theta_ss, std::size_t n_ss,
                               SsSemantics mode);

/// log Pr(SS vector | case), marginalized over the latent cause.
LogLik case_ss_loglik(std::span<const std::uint8_t> m, std::span<const double> pi,
                      std::span<const double> theta_ss, SsSemantics mode);

/// log Pr(GS vector | case): log pi_j for a one-hot vector at j, else -inf.
LogLik case_gs_loglik(std::span<const std::uint8_t> m, std::span<const double> pi);

/// Sum of every subject's likelihood contribution: bronze for all subjects,
/// SS where available, GS where available.
LogLik total_loglik(const Dataset& ds, const ModelParams& params,
                    SsSemantics mode = SsSemantics::strict);

/// Marginal positive rate of pathogen j among cases:
/// pi_j * theta_j + (1 - pi_j) * psi_j.
double case_positive_rate(double pi_j, double theta_j, double psi_j);

}  // namespace plcm
