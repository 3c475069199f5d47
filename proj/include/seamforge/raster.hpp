#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seamforge {

using Index = Eigen::Index;

/// Row-major dense grid; the storage type for every per-pixel field.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Strictly binary grid (0 or 1).
using BitPlane = Plane<std::uint8_t>;

class RasterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Multi-channel raster with unit-normalized samples.
///
/// Samples are kept planar (one Plane per channel) so that seam edits are
/// row-wise slices on each plane. The declared bit depth is the precision the
/// image was decoded from and will be encoded back to.
template <typename Scalar>
class Raster {
 public:
  Raster() = default;

  Raster(Index height, Index width, int channels, int bit_depth)
      : bit_depth_(bit_depth) {
    check_format(channels, bit_depth);
    if (height < 0 || width < 0) throw RasterError("negative raster dimensions");
    planes_.assign(static_cast<std::size_t>(channels), Plane<Scalar>::Zero(height, width));
  }

  Raster(std::vector<Plane<Scalar>> planes, int bit_depth)
      : planes_(std::move(planes)), bit_depth_(bit_depth) {
    check_format(static_cast<int>(planes_.size()), bit_depth);
    for (const auto& p : planes_) {
      if (p.rows() != planes_[0].rows() || p.cols() != planes_[0].cols())
        throw RasterError("channel planes differ in shape");
    }
  }

  Index height() const { return planes_.empty() ? 0 : planes_[0].rows(); }
  Index width() const { return planes_.empty() ? 0 : planes_[0].cols(); }
  int channels() const { return static_cast<int>(planes_.size()); }
  int bit_depth() const { return bit_depth_; }

  /// Largest code value at the declared bit depth.
  Scalar max_code() const { return static_cast<Scalar>((1u << bit_depth_) - 1u); }

  const Plane<Scalar>& plane(int c) const { return planes_[static_cast<std::size_t>(c)]; }
  Plane<Scalar>& plane(int c) { return planes_[static_cast<std::size_t>(c)]; }
  const std::vector<Plane<Scalar>>& planes() const { return planes_; }

  Scalar operator()(Index row, Index col, int c = 0) const { return plane(c)(row, col); }
  Scalar& operator()(Index row, Index col, int c = 0) { return plane(c)(row, col); }

  /// Per-pixel sum over channels.
  Plane<Scalar> channel_sum() const {
    Plane<Scalar> s = planes_[0];
    for (std::size_t c = 1; c < planes_.size(); ++c) s += planes_[c];
    return s;
  }

  bool samples_in_unit_range() const {
    for (const auto& p : planes_)
      if (p.size() > 0 && (p.minCoeff() < Scalar(0) || p.maxCoeff() > Scalar(1))) return false;
    return true;
  }

  friend bool operator==(const Raster& a, const Raster& b) {
    if (a.bit_depth_ != b.bit_depth_ || a.planes_.size() != b.planes_.size()) return false;
    for (std::size_t c = 0; c < a.planes_.size(); ++c) {
      if (a.planes_[c].rows() != b.planes_[c].rows() || a.planes_[c].cols() != b.planes_[c].cols())
        return false;
      if ((a.planes_[c] != b.planes_[c]).any()) return false;
    }
    return true;
  }

 private:
  static void check_format(int channels, int bit_depth) {
    if (channels != 1 && channels != 3)
      throw RasterError("unsupported channel count " + std::to_string(channels));
    if (bit_depth != 8 && bit_depth != 16)
      throw RasterError("unsupported bit depth " + std::to_string(bit_depth));
  }

  std::vector<Plane<Scalar>> planes_;
  int bit_depth_ = 8;
};

using RasterImage = Raster<double>;

enum class MaskKind { removal, protective, object };

struct PixelMask {
  MaskKind kind = MaskKind::removal;
  BitPlane bits;

  Index height() const { return bits.rows(); }
  Index width() const { return bits.cols(); }
  Index count() const { return bits.template cast<Index>().sum(); }
  bool empty() const { return count() == 0; }
};

/// Ground truth for a forged image: survivors adjacent to removed seams
/// (`removed`) and synthesized seam pixels (`inserted`), both in final-image
/// coordinates. The two layers may overlap.
struct SeamMask {
  BitPlane removed;
  BitPlane inserted;

  SeamMask() = default;
  SeamMask(Index height, Index width)
      : removed(BitPlane::Zero(height, width)), inserted(BitPlane::Zero(height, width)) {}

  Index height() const { return removed.rows(); }
  Index width() const { return removed.cols(); }

  friend bool operator==(const SeamMask& a, const SeamMask& b) {
    return a.removed.rows() == b.removed.rows() && a.removed.cols() == b.removed.cols() &&
           (a.removed == b.removed).all() && (a.inserted == b.inserted).all();
  }
};

struct TileRegion {
  Index origin_row = 0;
  Index origin_col = 0;
  Index size = 0;

  bool fits(Index height, Index width) const {
    return origin_row >= 0 && origin_col >= 0 && size > 0 && origin_row + size <= height &&
           origin_col + size <= width;
  }
  friend bool operator==(const TileRegion&, const TileRegion&) = default;
};

template <typename Scalar>
Raster<Scalar> crop(const Raster<Scalar>& img, const TileRegion& region) {
  if (!region.fits(img.height(), img.width()))
    throw RasterError("crop region outside image bounds");
  std::vector<Plane<Scalar>> planes;
  planes.reserve(static_cast<std::size_t>(img.channels()));
  for (const auto& p : img.planes())
    planes.emplace_back(p.block(region.origin_row, region.origin_col, region.size, region.size));
  return Raster<Scalar>(std::move(planes), img.bit_depth());
}

template <typename Derived>
Plane<typename Derived::Scalar> crop(const Eigen::ArrayBase<Derived>& grid, const TileRegion& region) {
  if (!region.fits(grid.rows(), grid.cols())) throw RasterError("crop region outside grid bounds");
  return grid.block(region.origin_row, region.origin_col, region.size, region.size);
}

inline SeamMask crop(const SeamMask& mask, const TileRegion& region) {
  SeamMask out;
  out.removed = crop(mask.removed, region);
  out.inserted = crop(mask.inserted, region);
  return out;
}

template <typename Scalar>
Raster<Scalar> transpose(const Raster<Scalar>& img) {
  std::vector<Plane<Scalar>> planes;
  planes.reserve(static_cast<std::size_t>(img.channels()));
  for (const auto& p : img.planes()) planes.emplace_back(p.transpose());
  return Raster<Scalar>(std::move(planes), img.bit_depth());
}

inline PixelMask transpose(const PixelMask& m) { return {m.kind, m.bits.transpose()}; }

inline SeamMask transpose(const SeamMask& m) {
  SeamMask out;
  out.removed = m.removed.transpose();
  out.inserted = m.inserted.transpose();
  return out;
}

}  // namespace seamforge
