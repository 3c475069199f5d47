#pragma once

#include "seamforge/carver.hpp"
#include "seamforge/codec.hpp"
#include "seamforge/forgery.hpp"
#include "seamforge/raster.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seamforge {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Post-processing

struct PostProcess {
  enum class Kind { jpeg, rotate };
  Kind kind = Kind::jpeg;
  int quality = 90;
  double degrees = 0.0;

  friend bool operator==(const PostProcess&, const PostProcess&) = default;
};

/// Parses `jpeg:<quality>` or `rotate:<degrees>`.
PostProcess parse_post(std::string_view text);
std::string to_string(const PostProcess& step);

/// Counter-clockwise rotation about the image centre with bilinear sampling.
/// The output keeps the input dimensions; exposed corners replicate the
/// nearest edge. Right angles use exact trigonometry, so on square images
/// they are pure pixel permutations.
RasterImage rotate(const RasterImage& img, double degrees);

/// Nearest-neighbour counterpart of rotate for binary layers; exposed corners
/// are 0.
BitPlane rotate(const BitPlane& mask, double degrees);
SeamMask rotate(const SeamMask& mask, double degrees);

/// JPEG steps encode at the given quality and decode again; the declared bit
/// depth of the input is kept.
RasterImage postprocess(const RasterImage& img, std::span<const PostProcess> chain);

double psnr(const RasterImage& a, const RasterImage& b);

// ---------------------------------------------------------------------------
// Tiling and splits

enum class TileStrategy { random, non_overlapping };

/// `count` is the number of random tiles; ignored for non_overlapping.
std::vector<TileRegion> extract_tiles(Index height, Index width, Index size, TileStrategy strategy,
                                      Index count, std::uint64_t seed);

enum class Split { train, val, test };
std::string_view to_string(Split s);

using SplitRatios = std::array<double, 3>;

/// Parses `80:10:10` (or fractions) into normalized train/val/test ratios.
SplitRatios parse_splits(std::string_view text);

/// Shuffles the distinct group ids and cuts them at the cumulative ratios.
std::map<std::string, Split> assign_splits(std::vector<std::string> groups, SplitRatios ratios,
                                           std::uint64_t seed);

/// Stable 64-bit mixing used to derive per-item seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);
std::uint64_t hash_name(std::string_view name);

// ---------------------------------------------------------------------------
// Generation

struct DatasetConfig {
  Index tile_size = 512;
  TileStrategy strategy = TileStrategy::random;
  Index tiles_per_image = 1;
  double ratio = 0.10;
  Variant variant = Variant::forward;
  SplitRatios splits{0.8, 0.1, 0.1};
  std::vector<PostProcess> post;
  bool include_pristine = true;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct ManifestEntry {
  std::string id;
  std::string source;
  TileRegion tile;
  Split split = Split::train;
  /// Empty for pristine samples.
  std::optional<ForgeryRecipe> recipe;
  std::string image_path;
  std::string mask_path;
  std::string seams_path;
  std::vector<PostProcess> post;
  std::uint64_t seed = 0;
  Index seams_removed = 0;
  Index seams_inserted = 0;
  std::string status = "ok";
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> warnings;
};

/// One JSON object per line, fixed field order.
std::string manifest_line(const ManifestEntry& entry);

/// Writes `<out>/images`, `<out>/masks` and `<out>/manifest/manifest.jsonl`.
/// Entries are ordered by (source name, tile index, pristine before forged)
/// whatever the number of jobs.
DatasetManifest generate_dataset(const std::filesystem::path& sources, const std::filesystem::path& out,
                                 const DatasetConfig& config);

}  // namespace seamforge
