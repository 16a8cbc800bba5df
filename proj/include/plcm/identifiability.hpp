// identifiability.hpp -- numerical rank audit of the bronze-data map.
//
// The forward map sends the 3J-1 free parameters (etiology simplex, bronze
// true- and false-positive rates) to the case and control pattern
// probability vectors, each over the 2^J binary patterns with the final
// pattern dropped for the sum-to-one constraint. A finite-difference
// Jacobian in logit coordinates is decomposed by SVD; with bronze data alone
// the map loses exactly J-1 directions, and appending the gold-standard
// probabilities (pi itself) to the image restores full column rank.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "plcm/model.hpp"

namespace plcm {

struct IdentifiabilityReport {
  std::vector<double> singular_values;  // descending
  std::size_t n_effective_zeros = 0;    // below threshold * largest
  std::size_t param_dim = 0;            // 3J - 1
  std::size_t image_dim = 0;            // 2(2^J - 1), plus J with GS rows
  double threshold = 0.0;               // relative zero threshold
  double fd_step = 0.0;                 // step on logit coordinates
  bool include_gs = false;
  bool quality_warning = false;         // half-step Jacobian disagreed
};

/// Case and control pattern probabilities (p1, p0). Pattern k has coordinate
/// j equal to bit j of k, k = 0 .. 2^J - 2 (the all-ones pattern is
/// dropped). Requires J <= 12. Silver parameters are ignored.
std::pair<std::vector<double>, std::vector<double>> forward_map(
    const ModelParams& params);

/// Central finite-difference Jacobian of the forward map in the 3J-1
/// unconstrained coordinates -- logits of pi_1..pi_{J-1}, theta, psi -- and
/// its singular value spectrum. Requires every rate and pi component in
/// (1e-3, 1 - 1e-3). With include_gs, the J gold-standard probabilities are
/// appended to the image.
IdentifiabilityReport jacobian_spectrum(const ModelParams& params,
                                        double fd_step = 1e-5,
                                        bool include_gs = false,
                                        double threshold = 1e-8);

/// Descending singular values of a dense row-major matrix (helper for rank
/// checks on sub-blocks).
std::vector<double> singular_values(const std::vector<std::vector<double>>& m);

}  // namespace plcm
