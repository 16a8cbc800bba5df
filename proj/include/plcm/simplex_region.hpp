// simplex_region.hpp -- highest-density credible regions for 3-component
// compositions.
//
// Pipeline: map simplex draws to the plane by an additive log-ratio (ALR)
// transform, fit a 2-D Gaussian kernel density estimate with a plug-in
// bandwidth matrix H = n^(-1/3) * Cov(draws), pick the density threshold
// whose upper level set holds `level` of the draws, trace the threshold
// contour on a regular grid (marching squares), and map the contour vertices
// back to barycentric coordinates. The ALR transform sends the open simplex
// onto the whole plane, so contours never need clipping against the simplex
// boundary.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace plcm {

struct SimplexRegion {
  double level = 0.95;
  std::size_t ref_component = 2;   // ALR reference (denominator) component
  std::size_t n_draws_used = 0;
  std::size_t grid_n = 0;          // marching-squares grid resolution per axis
  std::array<double, 4> bandwidth{};  // row-major 2x2 KDE bandwidth matrix
  double threshold = 0.0;          // KDE density threshold in ALR coordinates
  // Closed contour loops; each vertex is a barycentric triple summing to 1.
  std::vector<std::vector<std::array<double, 3>>> contours;
};

/// Builds the `level` credible region from 3-component simplex draws.
/// Requires at least 100 draws and exactly 3 components per draw; other
/// dimensions raise std::invalid_argument (use marginal intervals instead).
SimplexRegion credible_region_simplex(
    const std::vector<std::vector<double>>& pi_draws, double level = 0.95,
    std::size_t ref_component = 2);

/// Planar coordinates for ternary plotting: corner 0 at (0,0), corner 1 at
/// (1,0), corner 2 at (1/2, sqrt(3)/2).
std::array<double, 2> ternary_xy(std::span<const double> bary);

/// Total enclosed area of the region's contours in ternary_xy coordinates
/// (the full simplex has area sqrt(3)/4 ~= 0.433).
double region_area(const SimplexRegion& region);

/// Even-odd containment test of a simplex point against the contours; holes
/// (nested loops) are handled by parity.
bool region_contains(const SimplexRegion& region, std::span<const double> bary);

}  // namespace plcm
