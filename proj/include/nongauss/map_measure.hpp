#pragma once

// delta[E] = max over Gaussian inputs of delta[E(rho_G)], searched over
// rho_G = D(alpha) S(r) nu(n_t) S(r)^dag D(alpha)^dag with real alpha and r.
// A finite box and grid give a lower bound.

#include "nongauss/channels.hpp"
#include "nongauss/gaussian.hpp"
#include "nongauss/measure.hpp"
#include "nongauss/parallel.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

namespace nongauss {

struct SearchBox {
  double alpha_min = 0.0, alpha_max = 1.0;
  double r_min = 0.0, r_max = 1.0;
  double n_t_min = 0.0, n_t_max = 1.0;
  int grid = 11;                 // points per axis
  int refine_rounds = 12;        // step halvings in the local search
  int max_evaluations = 4000;
};

struct MapMeasureResult {
  double delta = 0.0;
  double alpha = 0.0, r = 0.0, n_t = 0.0;  // argmax
  int evaluations = 0;
  int skipped = 0;  // inputs where the channel output was undefined (no click)
  Flags flags;
};

/// delta[E(rho_G)] at one Gaussian input; nullopt if the conditioning fails.
inline std::optional<double> channel_output_delta(const ChannelParams& ch, double alpha, double r, double n_t) {
  const SingleModeParams p{cplx(alpha, 0.0), cplx(r, 0.0), n_t};
  rvec mean(2);
  mean << std::sqrt(2.0) * alpha, 0.0;
  const rmat s = squeeze_symplectic(r);
  const int cutoff = reference_cutoffs(gaussian_spec(mean, (n_t + 0.5) * s * s.transpose()))[0];
  const FockState input = single_mode_gaussian(p, std::max(cutoff, 4));
  try {
    return non_gaussianity(apply_channel(ch, input)).delta;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::conditioning) return std::nullopt;
    throw;
  }
}

inline MapMeasureResult map_non_gaussianity(const ChannelParams& ch, const SearchBox& box = {}, int parallelism = 1) {
  if (box.grid < 1 || box.alpha_min > box.alpha_max || box.r_min > box.r_max || box.n_t_min > box.n_t_max ||
      box.alpha_min < 0.0 || box.r_min < 0.0 || box.n_t_min < 0.0) {
    throw Error(ErrorKind::domain, "invalid search box");
  }
  using Point = std::array<double, 3>;
  const Point lo{box.alpha_min, box.r_min, box.n_t_min};
  const Point hi{box.alpha_max, box.r_max, box.n_t_max};
  auto axis = [&](int k, int i) { return box.grid == 1 ? lo[k] : lo[k] + (hi[k] - lo[k]) * i / (box.grid - 1); };

  MapMeasureResult best;
  best.flags.set(Flag::lower_bound);
  bool have_best = false;
  Point best_point{};

  // larger delta wins; ties go to the lexicographically smaller point
  auto consider = [&](const Point& x, const std::optional<double>& v) {
    ++best.evaluations;
    if (!v) {
      ++best.skipped;
      return false;
    }
    if (!have_best || *v > best.delta || (*v == best.delta && x < best_point)) {
      have_best = true;
      best.delta = *v;
      best_point = x;
      return true;
    }
    return false;
  };

  const int g = box.grid;
  std::vector<Point> grid_points;
  grid_points.reserve(static_cast<std::size_t>(g) * g * g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < g; ++k) grid_points.push_back({axis(0, i), axis(1, j), axis(2, k)});
  const auto values = ordered_map(
      grid_points.size(),
      [&](std::size_t i) { return channel_output_delta(ch, grid_points[i][0], grid_points[i][1], grid_points[i][2]); },
      parallelism);
  for (std::size_t i = 0; i < grid_points.size(); ++i) consider(grid_points[i], values[i]);

  // Compass search around the best grid point, clipped to the box.
  Point step{};
  for (int k = 0; k < 3; ++k) step[k] = g > 1 ? (hi[k] - lo[k]) / (g - 1) : 0.0;
  for (int round = 0; round < box.refine_rounds && have_best; ++round) {
    for (int k = 0; k < 3; ++k) step[k] *= 0.5;
    bool improved = true;
    while (improved) {
      improved = false;
      std::vector<Point> candidates;
      for (int k = 0; k < 3; ++k) {
        if (step[k] == 0.0) continue;
        for (double sign : {-1.0, 1.0}) {
          Point x = best_point;
          x[k] = std::clamp(x[k] + sign * step[k], lo[k], hi[k]);
          if (x != best_point) candidates.push_back(x);
        }
      }
      if (best.evaluations + static_cast<int>(candidates.size()) > box.max_evaluations) {
        best.flags.set(Flag::budget_exhausted);
        round = box.refine_rounds;
        break;
      }
      const auto vals = ordered_map(
          candidates.size(),
          [&](std::size_t i) { return channel_output_delta(ch, candidates[i][0], candidates[i][1], candidates[i][2]); },
          parallelism);
      for (std::size_t i = 0; i < candidates.size(); ++i) improved |= consider(candidates[i], vals[i]);
    }
  }
  best.alpha = best_point[0];
  best.r = best_point[1];
  best.n_t = best_point[2];
  return best;
}

}  // namespace nongauss
