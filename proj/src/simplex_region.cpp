#include "plcm/simplex_region.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace plcm {

namespace {

constexpr std::size_t kGridN = 96;
constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Alr {
  std::size_t i0, i1, ref;  // numerator components (ascending) and reference
};

Alr alr_layout(std::size_t ref_component) {
  if (ref_component > 2) {
    throw std::invalid_argument(
        "credible_region_simplex: reference component must be 0, 1, or 2");
  }
  Alr a{0, 1, ref_component};
  std::size_t pos = 0;
  std::size_t idx[2];
  for (std::size_t i = 0; i < 3; ++i) {
    if (i != ref_component) idx[pos++] = i;
  }
  a.i0 = idx[0];
  a.i1 = idx[1];
  return a;
}

std::array<double, 2> to_alr(std::span<const double> p, const Alr& a) {
  const double floor = 1e-12;
  const double p0 = std::max(p[a.i0], floor);
  const double p1 = std::max(p[a.i1], floor);
  const double pr = std::max(p[a.ref], floor);
  return {std::log(p0 / pr), std::log(p1 / pr)};
}

std::array<double, 3> from_alr(double u, double v, const Alr& a) {
  const double m = std::max({u, v, 0.0});
  const double e0 = std::exp(u - m);
  const double e1 = std::exp(v - m);
  const double er = std::exp(-m);
  const double d = e0 + e1 + er;
  std::array<double, 3> bary{};
  bary[a.i0] = e0 / d;
  bary[a.i1] = e1 / d;
  bary[a.ref] = er / d;
  return bary;
}

// Gaussian KDE with fixed bandwidth matrix H (row-major [h00,h01,h10,h11]).
struct Kde {
  const std::vector<std::array<double, 2>>& pts;
  double inv00, inv01, inv11;  // H^{-1} (symmetric)
  double norm;                 // 1 / (n * 2*pi * sqrt(det H))

  double operator()(double x, double y) const {
    double total = 0.0;
    for (const auto& p : pts) {
      const double dx = x - p[0];
      const double dy = y - p[1];
      const double q =
          dx * (inv00 * dx + inv01 * dy) + dy * (inv01 * dx + inv11 * dy);
      total += std::exp(-0.5 * q);
    }
    return total * norm;
  }
};

double interp(double g1, double g2, double t) {
  const double d = g2 - g1;
  if (d == 0.0) return 0.5;
  const double s = (t - g1) / d;
  return std::min(std::max(s, 0.0), 1.0);
}

struct Segment {
  std::uint64_t e0, e1;   // global edge ids of the two endpoints
  std::array<double, 2> p0, p1;
};

}  // namespace

std::array<double, 2> ternary_xy(std::span<const double> bary) {
  if (bary.size() != 3) {
    throw std::invalid_argument("ternary_xy: expected a 3-component point");
  }
  return {bary[1] + 0.5 * bary[2], 0.8660254037844386467637 * bary[2]};
}

SimplexRegion credible_region_simplex(
    const std::vector<std::vector<double>>& pi_draws, double level,
    std::size_t ref_component) {
  if (pi_draws.size() < 100) {
    throw std::invalid_argument(
        "credible_region_simplex: at least 100 draws are required for a "
        "stable kernel density estimate");
  }
  if (!(level > 0.0) || !(level < 1.0)) {
    throw std::invalid_argument(
        "credible_region_simplex: level must lie in (0, 1)");
  }
  for (const auto& d : pi_draws) {
    if (d.size() != 3) {
      throw std::invalid_argument(
          "credible_region_simplex: contour output exists only for "
          "3-component compositions; use marginal intervals for other "
          "dimensions");
    }
  }
  const Alr layout = alr_layout(ref_component);
  const std::size_t n = pi_draws.size();
  std::vector<std::array<double, 2>> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = to_alr(pi_draws[i], layout);

  // plug-in bandwidth: H = n^(-1/3) * sample covariance, ridged to stay
  // positive definite when draws are (near-)degenerate
  double mu = 0.0, mv = 0.0;
  for (const auto& p : z) {
    mu += p[0];
    mv += p[1];
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double s00 = 0.0, s01 = 0.0, s11 = 0.0;
  for (const auto& p : z) {
    const double du = p[0] - mu;
    const double dv = p[1] - mv;
    s00 += du * du;
    s01 += du * dv;
    s11 += dv * dv;
  }
  const double denom = static_cast<double>(n - 1);
  s00 /= denom;
  s01 /= denom;
  s11 /= denom;
  const double scale = std::pow(static_cast<double>(n), -1.0 / 3.0);
  double h00 = scale * s00;
  double h01 = scale * s01;
  double h11 = scale * s11;
  const double ridge = 1e-10 * std::max({h00, h11, 1e-30});
  h00 += ridge;
  h11 += ridge;
  const double det = h00 * h11 - h01 * h01;
  if (!(det > 0.0)) {
    throw std::runtime_error(
        "credible_region_simplex: bandwidth matrix is not positive definite");
  }
  Kde kde{z, h11 / det, -h01 / det, h00 / det,
          1.0 / (static_cast<double>(n) * kTwoPi * std::sqrt(det))};

  // threshold: (1 - level) empirical quantile of the density at the draws
  std::vector<double> dens(n);
  for (std::size_t i = 0; i < n; ++i) dens[i] = kde(z[i][0], z[i][1]);
  std::sort(dens.begin(), dens.end());
  const double q = (1.0 - level) * static_cast<double>(n - 1);
  const std::size_t lo_idx = static_cast<std::size_t>(q);
  const double frac = q - static_cast<double>(lo_idx);
  const double threshold =
      lo_idx + 1 < n ? dens[lo_idx] * (1.0 - frac) + dens[lo_idx + 1] * frac
                     : dens[lo_idx];

  // evaluation grid with a margin wide enough that the level set never
  // touches the border
  double umin = z[0][0], umax = z[0][0], vmin = z[0][1], vmax = z[0][1];
  for (const auto& p : z) {
    umin = std::min(umin, p[0]);
    umax = std::max(umax, p[0]);
    vmin = std::min(vmin, p[1]);
    vmax = std::max(vmax, p[1]);
  }
  const double margin_u = 5.0 * std::sqrt(h00) + 1e-9;
  const double margin_v = 5.0 * std::sqrt(h11) + 1e-9;
  umin -= margin_u;
  umax += margin_u;
  vmin -= margin_v;
  vmax += margin_v;
  const std::size_t gn = kGridN;
  const double du = (umax - umin) / static_cast<double>(gn - 1);
  const double dv = (vmax - vmin) / static_cast<double>(gn - 1);
  std::vector<double> grid(gn * gn);
  for (std::size_t iy = 0; iy < gn; ++iy) {
    for (std::size_t ix = 0; ix < gn; ++ix) {
      grid[iy * gn + ix] =
          kde(umin + du * static_cast<double>(ix),
              vmin + dv * static_cast<double>(iy));
    }
  }

  // marching squares: emit one or two interpolated segments per cell, with
  // endpoints tagged by global grid-edge ids for loop chaining
  const auto gval = [&](std::size_t ix, std::size_t iy) {
    return grid[iy * gn + ix];
  };
  const auto xat = [&](double ix) { return umin + du * ix; };
  const auto yat = [&](double iy) { return vmin + dv * iy; };
  const std::uint64_t n_horiz = static_cast<std::uint64_t>(gn - 1) * gn;
  const auto horiz_id = [&](std::size_t ix, std::size_t iy) {
    return static_cast<std::uint64_t>(iy) * (gn - 1) + ix;
  };
  const auto vert_id = [&](std::size_t ix, std::size_t iy) {
    return n_horiz + static_cast<std::uint64_t>(iy) * gn + ix;
  };

  std::vector<Segment> segments;
  for (std::size_t iy = 0; iy + 1 < gn; ++iy) {
    for (std::size_t ix = 0; ix + 1 < gn; ++ix) {
      const double bl = gval(ix, iy);
      const double br = gval(ix + 1, iy);
      const double tr = gval(ix + 1, iy + 1);
      const double tl = gval(ix, iy + 1);
      int code = 0;
      if (bl >= threshold) code |= 1;
      if (br >= threshold) code |= 2;
      if (tr >= threshold) code |= 4;
      if (tl >= threshold) code |= 8;
      if (code == 0 || code == 15) continue;

      const auto bottom = [&]() -> std::pair<std::uint64_t, std::array<double, 2>> {
        const double s = interp(bl, br, threshold);
        return {horiz_id(ix, iy),
                {xat(static_cast<double>(ix) + s), yat(static_cast<double>(iy))}};
      };
      const auto top = [&]() -> std::pair<std::uint64_t, std::array<double, 2>> {
        const double s = interp(tl, tr, threshold);
        return {horiz_id(ix, iy + 1),
                {xat(static_cast<double>(ix) + s),
                 yat(static_cast<double>(iy + 1))}};
      };
      const auto left = [&]() -> std::pair<std::uint64_t, std::array<double, 2>> {
        const double s = interp(bl, tl, threshold);
        return {vert_id(ix, iy),
                {xat(static_cast<double>(ix)), yat(static_cast<double>(iy) + s)}};
      };
      const auto right = [&]() -> std::pair<std::uint64_t, std::array<double, 2>> {
        const double s = interp(br, tr, threshold);
        return {vert_id(ix + 1, iy),
                {xat(static_cast<double>(ix + 1)),
                 yat(static_cast<double>(iy) + s)}};
      };
      const auto emit = [&](const std::pair<std::uint64_t, std::array<double, 2>>& a,
                            const std::pair<std::uint64_t, std::array<double, 2>>& b) {
        segments.push_back({a.first, b.first, a.second, b.second});
      };

      switch (code) {
        case 1:  case 14: emit(left(), bottom()); break;
        case 2:  case 13: emit(bottom(), right()); break;
        case 3:  case 12: emit(left(), right()); break;
        case 4:  case 11: emit(right(), top()); break;
        case 6:  case 9:  emit(bottom(), top()); break;
        case 7:  case 8:  emit(left(), top()); break;
        case 5: {
          const double center = 0.25 * (bl + br + tr + tl);
          if (center >= threshold) {
            emit(left(), top());
            emit(right(), bottom());
          } else {
            emit(left(), bottom());
            emit(right(), top());
          }
          break;
        }
        case 10: {
          const double center = 0.25 * (bl + br + tr + tl);
          if (center >= threshold) {
            emit(bottom(), right());
            emit(top(), left());
          } else {
            emit(bottom(), left());
            emit(top(), right());
          }
          break;
        }
        default: break;
      }
    }
  }

  // chain segments into closed loops by shared edge ids
  std::multimap<std::uint64_t, std::size_t> by_edge;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    by_edge.insert({segments[i].e0, i});
    by_edge.insert({segments[i].e1, i});
  }
  std::vector<char> used(segments.size(), 0);
  const auto next_on_edge = [&](std::uint64_t edge,
                                std::size_t self) -> std::ptrdiff_t {
    auto [lo, hi] = by_edge.equal_range(edge);
    for (auto it = lo; it != hi; ++it) {
      if (it->second != self && !used[it->second]) return
          static_cast<std::ptrdiff_t>(it->second);
    }
    return -1;
  };

  SimplexRegion region;
  region.level = level;
  region.ref_component = ref_component;
  region.n_draws_used = n;
  region.grid_n = gn;
  region.bandwidth = {h00, h01, h01, h11};
  region.threshold = threshold;

  for (std::size_t start = 0; start < segments.size(); ++start) {
    if (used[start]) continue;
    std::vector<std::array<double, 2>> loop_xy;
    used[start] = 1;
    loop_xy.push_back(segments[start].p0);
    loop_xy.push_back(segments[start].p1);
    std::uint64_t lead_edge = segments[start].e1;
    const std::uint64_t home_edge = segments[start].e0;
    for (;;) {
      const std::ptrdiff_t nxt = next_on_edge(lead_edge, start);
      if (nxt < 0) break;
      const Segment& s = segments[static_cast<std::size_t>(nxt)];
      used[static_cast<std::size_t>(nxt)] = 1;
      if (s.e0 == lead_edge) {
        loop_xy.push_back(s.p1);
        lead_edge = s.e1;
      } else {
        loop_xy.push_back(s.p0);
        lead_edge = s.e0;
      }
      if (lead_edge == home_edge) break;
    }
    if (loop_xy.size() < 3) continue;
    std::vector<std::array<double, 3>> loop_bary;
    loop_bary.reserve(loop_xy.size());
    for (const auto& p : loop_xy) {
      loop_bary.push_back(from_alr(p[0], p[1], layout));
    }
    region.contours.push_back(std::move(loop_bary));
  }
  return region;
}

double region_area(const SimplexRegion& region) {
  double total = 0.0;
  for (const auto& loop : region.contours) {
    double acc = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const auto a = ternary_xy(loop[i]);
      const auto b = ternary_xy(loop[(i + 1) % loop.size()]);
      acc += a[0] * b[1] - b[0] * a[1];
    }
    total += std::fabs(0.5 * acc);
  }
  return total;
}

bool region_contains(const SimplexRegion& region,
                     std::span<const double> bary) {
  const auto pt = ternary_xy(bary);
  bool inside = false;
  for (const auto& loop : region.contours) {
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const auto a = ternary_xy(loop[i]);
      const auto b = ternary_xy(loop[(i + 1) % loop.size()]);
      const bool straddles = (a[1] > pt[1]) != (b[1] > pt[1]);
      if (!straddles) continue;
      const double x_cross =
          a[0] + (pt[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
      if (pt[0] < x_cross) inside = !inside;
    }
  }
  return inside;
}

}  // namespace plcm
