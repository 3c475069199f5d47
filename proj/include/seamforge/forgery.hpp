#pragma once

#include "seamforge/carver.hpp"
#include "seamforge/metrics.hpp"
#include "seamforge/raster.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace seamforge {

class ForgeryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ForgeryKind { retarget, object_removal, object_displacement };
enum class Direction { left, right, up, down };

std::string_view to_string(ForgeryKind k);
std::string_view to_string(Direction d);
ForgeryKind parse_forgery_kind(std::string_view name);
Direction parse_direction(std::string_view name);

struct ForgeryRecipe {
  ForgeryKind kind = ForgeryKind::retarget;
  double ratio = 0.10;
  Variant variant = Variant::forward;
  std::optional<PixelMask> removal;
  std::optional<PixelMask> protective;
  std::optional<PixelMask> object;
  Direction direction = Direction::left;
  Index shift = 0;
  std::uint64_t seed = 0;
};

struct ForgeryResult {
  RasterImage forged;
  SeamMask gt;
  std::vector<SeamTrajectory> seams_removed;
  std::vector<SeamTrajectory> seams_inserted;
  /// Origin of every forged pixel, in the forged image's frame.
  ProvenanceGrid provenance;
  ForgeryRecipe recipe;
};

/// Ground truth from an edit history. The removed layer marks the surviving
/// left/right neighbours of every removed pixel (and every merged pixel); the
/// inserted layer marks every inserted pixel. Positions are those in the
/// provenance grid, i.e. the final image.
SeamMask build_gt_masks(const ProvenanceGrid& prov, const std::vector<EditEvent>& history);

struct Trajectories {
  std::vector<SeamTrajectory> removed;
  std::vector<SeamTrajectory> inserted;
};

/// Final-image path of every edit. A removed seam is located, per row, where
/// its right survivor (left at the border) ended up; inserted and merged
/// seams where their synthesized pixel ended up.
Trajectories seam_trajectories(const ProvenanceGrid& prov, const std::vector<EditEvent>& history);

/// Seams to remove for a ratio: round(ratio * width), halves away from zero.
Index seams_for_ratio(double ratio, Index width);

ForgeryResult retarget_forgery(const RasterImage& img, double ratio, Variant variant, std::uint64_t seed = 0);

ForgeryResult object_removal_forgery(const RasterImage& img, const PixelMask& removal,
                                     const std::optional<PixelMask>& protective, Variant variant);

ForgeryResult object_displacement_forgery(const RasterImage& img, const PixelMask& object, Direction direction,
                                          Index shift, Variant variant);

/// Dispatches on recipe.kind.
ForgeryResult forge(const RasterImage& img, const ForgeryRecipe& recipe);

}  // namespace seamforge
