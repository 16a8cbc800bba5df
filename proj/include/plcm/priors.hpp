// priors.hpp -- hyperprior construction and Beta quantile-matching elicitation.
//
// The incomplete beta CDF and its inverse are implemented here (continued
// fraction + bisection) so no external statistical runtime is needed;
// CDF accuracy target is 1e-10.

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "plcm/model.hpp"

namespace plcm {

struct BetaShape {
  double alpha = 1.0;
  double beta = 1.0;
};

struct HyperPriors {
  std::vector<double> a;     // Dirichlet weights, length J
  std::vector<BetaShape> b;  // bronze FPR priors, length J
  std::vector<BetaShape> c;  // bronze TPR priors, length J
  std::vector<BetaShape> d;  // silver TPR priors, length J'
};

/// Non-informative defaults: Dirichlet(1,...,1) and Beta(1,1) everywhere.
HyperPriors default_hyperpriors(const PathogenPanel& panel);

double log_beta_fn(double a, double b);

/// Regularized incomplete beta I_x(a, b); a, b > 0.
double beta_cdf(double a, double b, double x);

/// Inverse of beta_cdf in x, by bisection.
double beta_quantile(double a, double b, double p);

struct ElicitationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Finds (alpha, beta) such that the Beta(alpha, beta) quantiles at p_lo and
/// p_hi match `lo` and `hi` to within 1e-4, via bisection on alpha with an
/// inner solve for beta. The degenerate range (0, 1) maps to Beta(1, 1) by
/// convention; any other range touching 0 or 1 is unreachable by a proper
/// Beta and raises ElicitationError, as does failure to converge.
BetaShape elicit_beta_from_quantiles(double lo, double hi, double p_lo = 0.025,
                                     double p_hi = 0.975);

}  // namespace plcm
