#pragma once

#include "seamforge/raster.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace seamforge {

using Bytes = std::vector<std::uint8_t>;

enum class Container { png, jpeg, unknown };

Container sniff_container(std::span<const std::uint8_t> bytes);

struct DecodeOptions {
  /// JPEG input is refused unless the caller opts in.
  bool allow_lossy = false;
};

/// Decodes PNG (8/16-bit gray or RGB; palette and sub-byte gray are expanded
/// to 8 bits) or, when allowed, baseline JPEG. Alpha-carrying inputs are
/// rejected.
RasterImage decode_image(std::span<const std::uint8_t> bytes, DecodeOptions opts = {});

/// Lossless PNG at the image's declared bit depth. Output is deterministic.
Bytes encode_png(const RasterImage& img);

/// 8-bit baseline JPEG. 16-bit inputs are quantized to 8 bits first.
Bytes encode_jpeg(const RasterImage& img, int quality);

/// Red = removed-adjacent, green = inserted, yellow = both, black = neither.
Bytes encode_seam_mask(const SeamMask& mask);
/// Inverse of encode_seam_mask; any colour outside the four-colour palette is
/// an error.
SeamMask decode_seam_mask(std::span<const std::uint8_t> bytes);

/// Any non-zero sample marks the pixel.
PixelMask decode_pixel_mask(std::span<const std::uint8_t> bytes, MaskKind kind);
Bytes encode_pixel_mask(const PixelMask& mask);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace seamforge
