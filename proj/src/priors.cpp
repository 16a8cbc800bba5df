#include "plcm/priors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace plcm {

HyperPriors default_hyperpriors(const PathogenPanel& panel) {
  HyperPriors hp;
  const std::size_t j = panel.n_pathogens();
  hp.a.assign(j, 1.0);
  hp.b.assign(j, BetaShape{1.0, 1.0});
  hp.c.assign(j, BetaShape{1.0, 1.0});
  hp.d.assign(panel.n_ss, BetaShape{1.0, 1.0});
  return hp;
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Continued fraction for the regularized incomplete beta function, evaluated
// with the modified Lentz method. Converges quickly for x < (a+1)/(a+b+2).
double beta_cont_frac(double a, double b, double x) {
  constexpr double eps = 1e-15;
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double dm = static_cast<double>(m);
    double aa = dm * (b - dm) * x / ((qam + 2.0 * dm) * (a + 2.0 * dm));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + dm) * (qab + dm) * x / ((a + 2.0 * dm) * (qap + 2.0 * dm));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double beta_cdf(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("beta_cdf: shape parameters must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_cont_frac(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double p) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument(
        "beta_quantile: shape parameters must be positive");
  }
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (beta_cdf(a, b, mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

// For fixed alpha, finds beta such that F(hi; alpha, beta) = p_hi. The CDF at
// a fixed point is strictly increasing in beta, so a bracketed bisection on
// log(beta) is exact. Returns a negative value if no bracket exists within
// [1e-10, 1e12].
double solve_beta_for_alpha(double alpha, double hi, double p_hi) {
  double b_lo = 1e-10;
  double b_hi = 1e12;
  if (beta_cdf(alpha, b_lo, hi) > p_hi) return -1.0;
  if (beta_cdf(alpha, b_hi, hi) < p_hi) return -1.0;
  double l_lo = std::log(b_lo);
  double l_hi = std::log(b_hi);
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (l_lo + l_hi);
    if (beta_cdf(alpha, std::exp(mid), hi) < p_hi) {
      l_lo = mid;
    } else {
      l_hi = mid;
    }
  }
  return std::exp(0.5 * (l_lo + l_hi));
}

[[noreturn]] void elicitation_failure(double lo, double hi, double p_lo,
                                      double p_hi, const std::string& why) {
  std::ostringstream msg;
  msg << "beta elicitation failed for quantile targets (" << lo << ", " << hi
      << ") at probabilities (" << p_lo << ", " << p_hi << "): " << why;
  throw ElicitationError(msg.str());
}

}  // namespace

BetaShape elicit_beta_from_quantiles(double lo, double hi, double p_lo,
                                     double p_hi) {
  if (!(p_lo > 0.0) || !(p_hi < 1.0) || !(p_lo < p_hi)) {
    elicitation_failure(lo, hi, p_lo, p_hi,
                       "quantile probabilities must satisfy 0 < p_lo < p_hi < 1");
  }
  if (!(lo >= 0.0) || !(hi <= 1.0) || !(lo < hi)) {
    elicitation_failure(lo, hi, p_lo, p_hi,
                       "targets must satisfy 0 <= lo < hi <= 1");
  }
  if (lo == 0.0 && hi == 1.0) {
    return BetaShape{1.0, 1.0};  // full-range convention: uniform
  }
  if (lo == 0.0 || hi == 1.0) {
    elicitation_failure(lo, hi, p_lo, p_hi,
                       "a proper Beta distribution cannot place a quantile "
                       "exactly on the boundary of (0, 1)");
  }

  // Residual at the lower target once beta is matched to the upper target.
  // It is decreasing in alpha: larger alpha shifts mass right, dropping the
  // CDF at lo below p_lo.
  const auto residual = [&](double alpha, double* beta_out) {
    const double beta = solve_beta_for_alpha(alpha, hi, p_hi);
    if (beta_out != nullptr) *beta_out = beta;
    if (beta <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return beta_cdf(alpha, beta, lo) - p_lo;
  };

  double a_lo = 1e-8;
  double a_hi = 1e8;
  const double r_lo = residual(a_lo, nullptr);
  const double r_hi = residual(a_hi, nullptr);
  if (std::isnan(r_lo) || std::isnan(r_hi) || r_lo < 0.0 || r_hi > 0.0) {
    elicitation_failure(lo, hi, p_lo, p_hi,
                       "no Beta distribution attains both targets");
  }
  double l_lo = std::log(a_lo);
  double l_hi = std::log(a_hi);
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (l_lo + l_hi);
    const double r = residual(std::exp(mid), nullptr);
    if (std::isnan(r)) {
      elicitation_failure(lo, hi, p_lo, p_hi,
                         "inner solve for beta lost its bracket");
    }
    if (r > 0.0) {
      l_lo = mid;
    } else {
      l_hi = mid;
    }
  }
  const double alpha = std::exp(0.5 * (l_lo + l_hi));
  double beta = -1.0;
  residual(alpha, &beta);
  if (beta <= 0.0) {
    elicitation_failure(lo, hi, p_lo, p_hi, "inner solve for beta failed");
  }
  const BetaShape shape{alpha, beta};
  const double q_lo = beta_quantile(alpha, beta, p_lo);
  const double q_hi = beta_quantile(alpha, beta, p_hi);
  if (std::fabs(q_lo - lo) > 1e-4 || std::fabs(q_hi - hi) > 1e-4) {
    elicitation_failure(lo, hi, p_lo, p_hi,
                       "converged parameters miss the targets by more than 1e-4");
  }
  return shape;
}

}  // namespace plcm
