#pragma once

// Independent reference implementations and random generators for tests.

#include "seamforge/carver.hpp"
#include "seamforge/energy.hpp"
#include "seamforge/metrics.hpp"
#include "seamforge/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using namespace seamforge;
using Rng = std::mt19937_64;

inline Index uniform_index(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// 8-bit samples, so every value is an exact code / 255.
inline RasterImage random_image(Rng& rng, Index h, Index w, int channels = 3) {
  RasterImage img(h, w, channels, 8);
  std::uniform_int_distribution<int> code(0, 255);
  for (int ch = 0; ch < channels; ++ch)
    for (Index r = 0; r < h; ++r)
      for (Index c = 0; c < w; ++c) img(r, c, ch) = code(rng) / 255.0;
  return img;
}

/// Smooth gradient plus noise; gives seam carving something to prefer.
inline RasterImage textured_image(Rng& rng, Index h, Index w, int channels = 3) {
  RasterImage img(h, w, channels, 8);
  std::uniform_int_distribution<int> noise(-24, 24);
  for (int ch = 0; ch < channels; ++ch)
    for (Index r = 0; r < h; ++r)
      for (Index c = 0; c < w; ++c) {
        const double base = 127.5 + 90.0 * std::sin(0.21 * c + 0.7 * ch) * std::cos(0.13 * r);
        const int code = std::clamp(static_cast<int>(base) + noise(rng), 0, 255);
        img(r, c, ch) = code / 255.0;
      }
  return img;
}

inline std::vector<Index> random_walk(Rng& rng, Index h, Index lo, Index hi) {
  std::vector<Index> cols(static_cast<std::size_t>(h));
  cols[0] = uniform_index(rng, lo, hi);
  for (std::size_t r = 1; r < cols.size(); ++r)
    cols[r] = std::clamp<Index>(cols[r - 1] + uniform_index(rng, -1, 1), lo, hi);
  return cols;
}

// ---------------------------------------------------------------------------
// Seam enumeration

/// Cost of one path, accumulated row by row as e + (previous + step cost).
inline double path_cost(const Plane<double>& e, const ForwardCosts<double>* fc, const std::vector<Index>& cols) {
  double acc = fc ? e(0, cols[0]) + fc->up(0, cols[0]) : e(0, cols[0]);
  for (std::size_t i = 1; i < cols.size(); ++i) {
    const Index r = static_cast<Index>(i);
    const Index c = cols[i];
    double step = 0.0;
    if (fc) {
      const Index d = cols[i - 1] - c;
      step = d < 0 ? fc->left(r, c) : d > 0 ? fc->right(r, c) : fc->up(r, c);
    }
    acc = e(r, c) + (acc + step);
  }
  return acc;
}

/// Minimum over every 8-connected vertical path by depth-first enumeration.
inline double brute_force_min(const Plane<double>& e, const ForwardCosts<double>* fc) {
  const Index h = e.rows();
  const Index w = e.cols();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> cols(static_cast<std::size_t>(h));
  auto dfs = [&](auto&& self, Index r) -> void {
    if (r == h) {
      best = std::min(best, path_cost(e, fc, cols));
      return;
    }
    for (Index d = -1; d <= 1; ++d) {
      const Index c = cols[static_cast<std::size_t>(r - 1)] + d;
      if (c < 0 || c >= w) continue;
      cols[static_cast<std::size_t>(r)] = c;
      self(self, r + 1);
    }
  };
  for (Index c = 0; c < w; ++c) {
    cols[0] = c;
    dfs(dfs, 1);
  }
  return best;
}

/// Forward costs straight from the pixel-adjacency definition.
inline ForwardCosts<double> forward_costs_naive(const RasterImage& img) {
  const Index h = img.height();
  const Index w = img.width();
  ForwardCosts<double> fc{Plane<double>::Zero(h, w), Plane<double>::Zero(h, w), Plane<double>::Zero(h, w)};
  auto at = [&](Index r, Index c, int ch) {
    return img(std::clamp<Index>(r, 0, h - 1), std::clamp<Index>(c, 0, w - 1), ch);
  };
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c < w; ++c)
      for (int ch = 0; ch < img.channels(); ++ch) {
        const double cu = std::abs(at(r, c + 1, ch) - at(r, c - 1, ch));
        fc.up(r, c) += cu;
        fc.left(r, c) += cu + std::abs(at(r - 1, c, ch) - at(r, c - 1, ch));
        fc.right(r, c) += cu + std::abs(at(r - 1, c, ch) - at(r, c + 1, ch));
      }
  return fc;
}

// ---------------------------------------------------------------------------
// Metrics

struct Formulas {
  double accuracy, precision, recall, f1, mcc;
};

inline Formulas metric_formulas(double tp, double fp, double fn, double tn) {
  Formulas f{};
  const double n = tp + fp + fn + tn;
  f.accuracy = n > 0 ? (tp + tn) / n : 0.0;
  if (tp + fn == 0) return f;
  f.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  f.recall = tp / (tp + fn);
  f.f1 = 2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0.0;
  const double den = std::sqrt(tp + fp) * std::sqrt(tp + fn) * std::sqrt(tn + fp) * std::sqrt(tn + fn);
  f.mcc = den > 0 ? (tp * tn - fp * fn) / den : 0.0;
  return f;
}

inline bool close_rel(double a, double b, double tol = 1e-12) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline BitPlane seam_plane(Index h, Index w, const std::vector<Index>& cols) {
  BitPlane m = BitPlane::Zero(h, w);
  for (Index r = 0; r < h; ++r) m(r, cols[static_cast<std::size_t>(r)]) = 1;
  return m;
}

inline std::uint64_t count(const BitPlane& m) { return static_cast<std::uint64_t>(m.cast<std::int64_t>().sum()); }

}  // namespace oracle
