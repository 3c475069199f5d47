#pragma once

#include "seamforge/raster.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <array>

namespace seamforge {

/// Energy assigned to removal-mask pixels. Must dominate any achievable
/// unbiased path sum on the images this library targets.
inline constexpr double kLowBias = -1000.0;
/// Energy assigned to protective-mask pixels.
inline constexpr double kHighBias = 1000.0;

template <typename Scalar>
using EnergyMap = Plane<Scalar>;

/// Costs of the new adjacencies a seam step would create, indexed by the
/// pixel the seam enters: from the upper-left (`left`), from directly above
/// (`up`) or from the upper-right (`right`).
template <typename Scalar>
struct ForwardCosts {
  Plane<Scalar> left;
  Plane<Scalar> up;
  Plane<Scalar> right;
};

namespace detail {

inline Index clamp_index(Index i, Index n) { return std::clamp<Index>(i, 0, n - 1); }

/// Separable (1,4,6,4,1)/16 filter with replicated borders.
template <typename Scalar>
Plane<Scalar> binomial5(const Plane<Scalar>& src) {
  static constexpr Scalar kTaps[5] = {1, 4, 6, 4, 1};
  const Index h = src.rows();
  const Index w = src.cols();
  Plane<Scalar> tmp(h, w);
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < w; ++c) {
      Scalar acc = 0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * src(r, clamp_index(c + k, w));
      tmp(r, c) = acc / Scalar(16);
    }
  }
  Plane<Scalar> out(h, w);
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < w; ++c) {
      Scalar acc = 0;
      for (int k = -2; k <= 2; ++k) acc += kTaps[k + 2] * tmp(clamp_index(r + k, h), c);
      out(r, c) = acc / Scalar(16);
    }
  }
  return out;
}

template <typename Scalar>
Scalar srgb_to_linear(Scalar v) {
  return v <= Scalar(0.04045) ? v / Scalar(12.92) : std::pow((v + Scalar(0.055)) / Scalar(1.055), Scalar(2.4));
}

template <typename Scalar>
Scalar lab_f(Scalar t) {
  constexpr Scalar delta = Scalar(6) / Scalar(29);
  return t > delta * delta * delta ? std::cbrt(t) : t / (3 * delta * delta) + Scalar(4) / Scalar(29);
}

}  // namespace detail

/// Gradient magnitude of the channel-summed image using first-order central
/// differences, sqrt(Ix^2 + Iy^2), with replicated borders.
template <typename Scalar>
EnergyMap<Scalar> backward_energy(const Raster<Scalar>& img) {
  const Plane<Scalar> s = img.channel_sum();
  const Index h = s.rows();
  const Index w = s.cols();
  EnergyMap<Scalar> e(h, w);
  for (Index r = 0; r < h; ++r) {
    const Index up = detail::clamp_index(r - 1, h);
    const Index down = detail::clamp_index(r + 1, h);
    for (Index c = 0; c < w; ++c) {
      const Scalar ix = (s(r, detail::clamp_index(c + 1, w)) - s(r, detail::clamp_index(c - 1, w))) / Scalar(2);
      const Scalar iy = (s(down, c) - s(up, c)) / Scalar(2);
      e(r, c) = std::sqrt(ix * ix + iy * iy);
    }
  }
  return e;
}

template <typename Scalar>
ForwardCosts<Scalar> forward_costs(const Raster<Scalar>& img) {
  const Index h = img.height();
  const Index w = img.width();
  ForwardCosts<Scalar> fc{Plane<Scalar>::Zero(h, w), Plane<Scalar>::Zero(h, w), Plane<Scalar>::Zero(h, w)};
  for (const auto& p : img.planes()) {
    for (Index r = 0; r < h; ++r) {
      const Index up = detail::clamp_index(r - 1, h);
      for (Index c = 0; c < w; ++c) {
        const Scalar left = p(r, detail::clamp_index(c - 1, w));
        const Scalar right = p(r, detail::clamp_index(c + 1, w));
        const Scalar above = p(up, c);
        const Scalar bridge = std::abs(right - left);
        fc.up(r, c) += bridge;
        fc.left(r, c) += bridge + std::abs(above - left);
        fc.right(r, c) += bridge + std::abs(above - right);
      }
    }
  }
  return fc;
}

/// Per-pixel Lab triple. Three-channel input is treated as sRGB (D65);
/// single-channel input maps linearly onto L in [0,100] with a = b = 0.
template <typename Scalar>
std::array<Plane<Scalar>, 3> to_lab(const Raster<Scalar>& img) {
  const Index h = img.height();
  const Index w = img.width();
  std::array<Plane<Scalar>, 3> lab{Plane<Scalar>::Zero(h, w), Plane<Scalar>::Zero(h, w), Plane<Scalar>::Zero(h, w)};
  if (img.channels() == 1) {
    lab[0] = img.plane(0) * Scalar(100);
    return lab;
  }
  Eigen::Matrix<Scalar, 3, 3> rgb_to_xyz;
  rgb_to_xyz << Scalar(0.4124564), Scalar(0.3575761), Scalar(0.1804375),
                Scalar(0.2126729), Scalar(0.7151522), Scalar(0.0721750),
                Scalar(0.0193339), Scalar(0.1191920), Scalar(0.9503041);
  const Eigen::Matrix<Scalar, 3, 1> white(Scalar(0.95047), Scalar(1.0), Scalar(1.08883));
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < w; ++c) {
      Eigen::Matrix<Scalar, 3, 1> rgb;
      for (int ch = 0; ch < 3; ++ch) rgb[ch] = detail::srgb_to_linear(img(r, c, ch));
      const Eigen::Matrix<Scalar, 3, 1> xyz = (rgb_to_xyz * rgb).cwiseQuotient(white);
      const Scalar fx = detail::lab_f(xyz[0]);
      const Scalar fy = detail::lab_f(xyz[1]);
      const Scalar fz = detail::lab_f(xyz[2]);
      lab[0](r, c) = Scalar(116) * fy - Scalar(16);
      lab[1](r, c) = Scalar(500) * (fx - fy);
      lab[2](r, c) = Scalar(200) * (fy - fz);
    }
  }
  return lab;
}

/// Frequency-tuned saliency: distance in Lab between the image-mean colour and
/// the binomially blurred image at each pixel.
template <typename Scalar>
EnergyMap<Scalar> saliency_energy(const Raster<Scalar>& img) {
  const auto lab = to_lab(img);
  EnergyMap<Scalar> sq = EnergyMap<Scalar>::Zero(img.height(), img.width());
  for (const auto& channel : lab) {
    if (channel.size() == 0) continue;
    const Scalar mean = channel.mean();
    sq += (detail::binomial5(channel) - mean).square();
  }
  return sq.sqrt();
}

/// Overwrites removal pixels with kLowBias and protective pixels with
/// kHighBias. The two masks must not overlap.
template <typename Scalar>
EnergyMap<Scalar> apply_mask_bias(EnergyMap<Scalar> e, const BitPlane* removal, const BitPlane* protective) {
  auto check = [&](const BitPlane* m) {
    if (m && (m->rows() != e.rows() || m->cols() != e.cols()))
      throw RasterError("mask dimensions do not match the energy map");
  };
  check(removal);
  check(protective);
  if (removal && protective && ((*removal != 0) && (*protective != 0)).any())
    throw RasterError("removal and protective masks overlap");
  if (removal) e = (*removal != 0).select(Scalar(kLowBias), e);
  if (protective) e = (*protective != 0).select(Scalar(kHighBias), e);
  return e;
}

template <typename Scalar>
EnergyMap<Scalar> apply_mask_bias(EnergyMap<Scalar> e, const PixelMask* removal, const PixelMask* protective) {
  return apply_mask_bias(std::move(e), removal ? &removal->bits : nullptr,
                         protective ? &protective->bits : nullptr);
}

}  // namespace seamforge
