#include "plcm/identifiability.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace plcm {

namespace {

constexpr double kInteriorEps = 1e-3;

double logit(double p) { return std::log(p / (1.0 - p)); }
double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void require_interior(const ModelParams& params) {
  const auto interior = [](double v) {
    return v > kInteriorEps && v < 1.0 - kInteriorEps;
  };
  for (double v : params.pi) {
    if (!interior(v)) {
      throw std::invalid_argument(
          "jacobian_spectrum: pi components must lie in (1e-3, 1-1e-3)");
    }
  }
  for (double v : params.theta_brs) {
    if (!interior(v)) {
      throw std::invalid_argument(
          "jacobian_spectrum: bronze TPRs must lie in (1e-3, 1-1e-3)");
    }
  }
  for (double v : params.psi_brs) {
    if (!interior(v)) {
      throw std::invalid_argument(
          "jacobian_spectrum: bronze FPRs must lie in (1e-3, 1-1e-3)");
    }
  }
}

// Coordinates: logit(pi_1..pi_{J-1}), logit(theta_1..J), logit(psi_1..J).
std::vector<double> to_coords(const ModelParams& params) {
  const std::size_t n_path = params.pi.size();
  std::vector<double> x;
  x.reserve(3 * n_path - 1);
  for (std::size_t j = 0; j + 1 < n_path; ++j) x.push_back(logit(params.pi[j]));
  for (double v : params.theta_brs) x.push_back(logit(v));
  for (double v : params.psi_brs) x.push_back(logit(v));
  return x;
}

ModelParams from_coords(const std::vector<double>& x, std::size_t n_path) {
  ModelParams p;
  p.pi.resize(n_path);
  p.theta_brs.resize(n_path);
  p.psi_brs.resize(n_path);
  double tail = 1.0;
  for (std::size_t j = 0; j + 1 < n_path; ++j) {
    p.pi[j] = expit(x[j]);
    tail -= p.pi[j];
  }
  p.pi[n_path - 1] = tail;
  for (std::size_t j = 0; j < n_path; ++j) {
    p.theta_brs[j] = expit(x[n_path - 1 + j]);
    p.psi_brs[j] = expit(x[2 * n_path - 1 + j]);
  }
  return p;
}

std::vector<double> image_vector(const ModelParams& params, bool include_gs) {
  auto [p1, p0] = forward_map(params);
  std::vector<double> out;
  out.reserve(p1.size() + p0.size() + (include_gs ? params.pi.size() : 0));
  out.insert(out.end(), p1.begin(), p1.end());
  out.insert(out.end(), p0.begin(), p0.end());
  if (include_gs) out.insert(out.end(), params.pi.begin(), params.pi.end());
  return out;
}

Eigen::MatrixXd fd_jacobian(const std::vector<double>& x0, std::size_t n_path,
                            bool include_gs, double h) {
  const std::size_t dim = x0.size();
  Eigen::MatrixXd jac;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> xp = x0;
    std::vector<double> xm = x0;
    xp[i] += h;
    xm[i] -= h;
    const std::vector<double> fp =
        image_vector(from_coords(xp, n_path), include_gs);
    const std::vector<double> fm =
        image_vector(from_coords(xm, n_path), include_gs);
    if (jac.size() == 0) {
      jac.resize(static_cast<Eigen::Index>(fp.size()),
                 static_cast<Eigen::Index>(dim));
    }
    for (std::size_t r = 0; r < fp.size(); ++r) {
      jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
          (fp[r] - fm[r]) / (2.0 * h);
    }
  }
  return jac;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> forward_map(
    const ModelParams& params) {
  const std::size_t n_path = params.pi.size();
  if (n_path == 0 || n_path > 12) {
    throw std::invalid_argument(
        "forward_map: pattern enumeration supports 1 to 12 pathogens");
  }
  const std::size_t n_patterns = std::size_t{1} << n_path;
  std::vector<double> p1, p0;
  p1.reserve(n_patterns - 1);
  p0.reserve(n_patterns - 1);
  for (std::size_t k = 0; k + 1 < n_patterns; ++k) {
    double ctrl = 1.0;
    for (std::size_t l = 0; l < n_path; ++l) {
      const bool bit = (k >> l) & 1U;
      ctrl *= bit ? params.psi_brs[l] : 1.0 - params.psi_brs[l];
    }
    double mix = 0.0;
    for (std::size_t j = 0; j < n_path; ++j) {
      double term = params.pi[j];
      for (std::size_t l = 0; l < n_path; ++l) {
        const bool bit = (k >> l) & 1U;
        const double rate = l == j ? params.theta_brs[l] : params.psi_brs[l];
        term *= bit ? rate : 1.0 - rate;
      }
      mix += term;
    }
    p1.push_back(mix);
    p0.push_back(ctrl);
  }
  return {std::move(p1), std::move(p0)};
}

IdentifiabilityReport jacobian_spectrum(const ModelParams& params,
                                        double fd_step, bool include_gs,
                                        double threshold) {
  if (!(fd_step > 0.0)) {
    throw std::invalid_argument("jacobian_spectrum: fd_step must be positive");
  }
  require_interior(params);
  const std::size_t n_path = params.pi.size();
  const std::vector<double> x0 = to_coords(params);

  const Eigen::MatrixXd jac = fd_jacobian(x0, n_path, include_gs, fd_step);
  const Eigen::MatrixXd jac_half =
      fd_jacobian(x0, n_path, include_gs, 0.5 * fd_step);
  const double scale = jac.norm();
  const bool warn =
      scale > 0.0 ? (jac - jac_half).norm() / scale > 1e-3 : false;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const Eigen::VectorXd sv = svd.singularValues();

  IdentifiabilityReport report;
  report.param_dim = 3 * n_path - 1;
  report.image_dim = 2 * ((std::size_t{1} << n_path) - 1) +
                     (include_gs ? n_path : 0);
  report.threshold = threshold;
  report.fd_step = fd_step;
  report.include_gs = include_gs;
  report.quality_warning = warn;
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double cutoff =
      report.singular_values.empty() ? 0.0
                                     : threshold * report.singular_values[0];
  for (double s : report.singular_values) {
    if (s < cutoff) ++report.n_effective_zeros;
  }
  return report;
}

std::vector<double> singular_values(
    const std::vector<std::vector<double>>& m) {
  if (m.empty() || m.front().empty()) {
    throw std::invalid_argument("singular_values: empty matrix");
  }
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows),
                      static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (m[r].size() != cols) {
      throw std::invalid_argument("singular_values: ragged matrix");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m[r][c];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
  const Eigen::VectorXd sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

}  // namespace plcm
