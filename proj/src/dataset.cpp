#include "seamforge/dataset.hpp"

#include "seamforge/serialize.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <set>
#include <thread>

namespace seamforge {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Post-processing

PostProcess parse_post(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw DatasetError("post-processing step must be kind:value");
  const std::string_view kind = text.substr(0, colon);
  const std::string value(text.substr(colon + 1));
  PostProcess step;
  try {
    std::size_t used = 0;
    if (kind == "jpeg") {
      step.kind = PostProcess::Kind::jpeg;
      step.quality = std::stoi(value, &used);
      if (step.quality < 1 || step.quality > 100) throw DatasetError("jpeg quality must be in [1,100]");
    } else if (kind == "rotate") {
      step.kind = PostProcess::Kind::rotate;
      const double deg = std::stod(value, &used);
      if (!std::isfinite(deg)) throw DatasetError("rotation must be finite");
      step.degrees = std::fmod(std::fmod(deg, 360.0) + 360.0, 360.0);
    } else {
      throw DatasetError("unknown post-processing kind '" + std::string(kind) + "'");
    }
    if (used != value.size()) throw DatasetError("trailing characters in '" + std::string(text) + "'");
  } catch (const std::logic_error&) {
    throw DatasetError("cannot parse post-processing step '" + std::string(text) + "'");
  }
  return step;
}

std::string to_string(const PostProcess& step) {
  if (step.kind == PostProcess::Kind::jpeg) return "jpeg:" + std::to_string(step.quality);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "rotate:%.17g", step.degrees);
  return buf;
}

namespace {

/// cos/sin with exact values at right angles.
std::pair<double, double> rotation_trig(double degrees) {
  const double d = std::fmod(std::fmod(degrees, 360.0) + 360.0, 360.0);
  if (d == 0.0) return {1.0, 0.0};
  if (d == 90.0) return {0.0, 1.0};
  if (d == 180.0) return {-1.0, 0.0};
  if (d == 270.0) return {0.0, -1.0};
  const double rad = d * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

/// Source coordinate (x, y) of output pixel (row, col).
template <typename Fn>
void for_each_source(Index h, Index w, double degrees, Fn&& fn) {
  const auto [cs, sn] = rotation_trig(degrees);
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;
  for (Index r = 0; r < h; ++r) {
    for (Index c = 0; c < w; ++c) {
      const double dx = static_cast<double>(c) - cx;
      const double dy = static_cast<double>(r) - cy;
      fn(r, c, cx + cs * dx - sn * dy, cy + sn * dx + cs * dy);
    }
  }
}

}  // namespace

RasterImage rotate(const RasterImage& img, double degrees) {
  const Index h = img.height();
  const Index w = img.width();
  RasterImage out(h, w, img.channels(), img.bit_depth());
  if (h == 0 || w == 0) return out;
  for_each_source(h, w, degrees, [&](Index r, Index c, double sx, double sy) {
    sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
    sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
    const Index x0 = static_cast<Index>(std::floor(sx));
    const Index y0 = static_cast<Index>(std::floor(sy));
    const Index x1 = std::min(x0 + 1, w - 1);
    const Index y1 = std::min(y0 + 1, h - 1);
    const double fx = sx - static_cast<double>(x0);
    const double fy = sy - static_cast<double>(y0);
    for (int ch = 0; ch < img.channels(); ++ch) {
      const auto& p = img.plane(ch);
      const double top = (1.0 - fx) * p(y0, x0) + fx * p(y0, x1);
      const double bottom = (1.0 - fx) * p(y1, x0) + fx * p(y1, x1);
      out(r, c, ch) = std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
    }
  });
  return out;
}

BitPlane rotate(const BitPlane& mask, double degrees) {
  const Index h = mask.rows();
  const Index w = mask.cols();
  BitPlane out = BitPlane::Zero(h, w);
  for_each_source(h, w, degrees, [&](Index r, Index c, double sx, double sy) {
    const auto x = static_cast<Index>(std::lround(sx));
    const auto y = static_cast<Index>(std::lround(sy));
    if (x >= 0 && x < w && y >= 0 && y < h) out(r, c) = mask(y, x);
  });
  return out;
}

SeamMask rotate(const SeamMask& mask, double degrees) {
  SeamMask out;
  out.removed = rotate(mask.removed, degrees);
  out.inserted = rotate(mask.inserted, degrees);
  return out;
}

RasterImage postprocess(const RasterImage& img, std::span<const PostProcess> chain) {
  RasterImage cur = img;
  for (const auto& step : chain) {
    if (step.kind == PostProcess::Kind::rotate) {
      cur = rotate(cur, step.degrees);
    } else {
      RasterImage decoded = decode_image(encode_jpeg(cur, step.quality), DecodeOptions{true});
      cur = RasterImage(decoded.planes(), cur.bit_depth());
    }
  }
  return cur;
}

double psnr(const RasterImage& a, const RasterImage& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels())
    throw DatasetError("psnr needs images of equal shape");
  double sq = 0.0;
  Index n = 0;
  for (int ch = 0; ch < a.channels(); ++ch) {
    sq += (a.plane(ch) - b.plane(ch)).square().sum();
    n += a.plane(ch).size();
  }
  const double mse = sq / static_cast<double>(n);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

// ---------------------------------------------------------------------------
// Tiling and splits

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<TileRegion> extract_tiles(Index height, Index width, Index size, TileStrategy strategy, Index count,
                                      std::uint64_t seed) {
  if (size < 1) throw DatasetError("tile size must be positive");
  if (size > std::min(height, width)) throw DatasetError("tile size exceeds the image");
  std::vector<TileRegion> tiles;
  if (strategy == TileStrategy::non_overlapping) {
    for (Index r = 0; r + size <= height; r += size)
      for (Index c = 0; c + size <= width; c += size) tiles.push_back({r, c, size});
    return tiles;
  }
  if (count < 0) throw DatasetError("tile count must be non-negative");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> rows(0, height - size);
  std::uniform_int_distribution<Index> cols(0, width - size);
  for (Index i = 0; i < count; ++i) {
    const Index r = rows(rng);
    tiles.push_back({r, cols(rng), size});
  }
  return tiles;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

SplitRatios parse_splits(std::string_view text) {
  SplitRatios r{};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t end = i < 2 ? text.find(':', start) : text.size();
    if (end == std::string_view::npos) throw DatasetError("splits must look like 80:10:10");
    const std::string part(text.substr(start, end - start));
    try {
      std::size_t used = 0;
      r[i] = std::stod(part, &used);
      if (used != part.size()) throw DatasetError("bad split value '" + part + "'");
    } catch (const std::logic_error&) {
      throw DatasetError("bad split value '" + part + "'");
    }
    if (!(r[i] >= 0.0) || !std::isfinite(r[i])) throw DatasetError("split values must be non-negative");
    start = end + 1;
  }
  const double sum = r[0] + r[1] + r[2];
  if (sum <= 0.0) throw DatasetError("split values sum to zero");
  for (double& v : r) v /= sum;
  return r;
}

std::map<std::string, Split> assign_splits(std::vector<std::string> groups, SplitRatios ratios, std::uint64_t seed) {
  if (groups.empty()) throw DatasetError("no groups to split");
  for (double v : ratios)
    if (!(v >= 0.0)) throw DatasetError("split ratios must be non-negative");
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) throw DatasetError("split ratios must sum to 1");

  std::sort(groups.begin(), groups.end());
  groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
  std::mt19937_64 rng(seed);
  std::shuffle(groups.begin(), groups.end(), rng);

  const double n = static_cast<double>(groups.size());
  const auto train_end = static_cast<std::size_t>(std::lround(n * ratios[0]));
  const auto val_end = std::max(train_end, static_cast<std::size_t>(std::lround(n * (ratios[0] + ratios[1]))));
  std::map<std::string, Split> out;
  for (std::size_t i = 0; i < groups.size(); ++i)
    out[groups[i]] = i < train_end ? Split::train : (i < val_end ? Split::val : Split::test);
  return out;
}

// ---------------------------------------------------------------------------
// Generation

std::string manifest_line(const ManifestEntry& e) {
  Json j;
  j["id"] = e.id;
  j["source"] = e.source;
  j["tile"] = {{"row", e.tile.origin_row}, {"col", e.tile.origin_col}, {"size", e.tile.size}};
  j["split"] = std::string(to_string(e.split));
  j["recipe"] = e.recipe ? recipe_to_json(*e.recipe) : Json("pristine");
  j["image"] = e.image_path;
  j["mask"] = e.mask_path;
  j["seams"] = e.seams_path;
  Json post = Json::array();
  for (const auto& p : e.post) post.push_back(to_string(p));
  j["post"] = post;
  j["seed"] = e.seed;
  j["seams_removed"] = e.seams_removed;
  j["seams_inserted"] = e.seams_inserted;
  j["status"] = e.status;
  return j.dump();
}

namespace {

struct Source {
  std::string name;  // file name
  std::string group;  // stem
  std::optional<RasterImage> image;
  std::string error;
  std::vector<TileRegion> tiles;
};

struct WorkItem {
  std::size_t source = 0;
  std::size_t tile = 0;
};

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

/// Applies the post chain to the sample and encodes it. A chain ending in a
/// JPEG step is stored as that JPEG bitstream.
std::pair<Bytes, std::string> encode_sample(const RasterImage& img, SeamMask& mask,
                                            const std::vector<PostProcess>& chain) {
  RasterImage cur = img;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& step = chain[i];
    if (step.kind == PostProcess::Kind::rotate) mask = rotate(mask, step.degrees);
    if (i + 1 == chain.size() && step.kind == PostProcess::Kind::jpeg)
      return {encode_jpeg(cur, step.quality), ".jpg"};
    cur = postprocess(cur, std::span(&step, 1));
  }
  return {encode_png(cur), ".png"};
}

std::vector<ManifestEntry> run_item(const Source& src, std::size_t tile_index, Split split,
                                    const DatasetConfig& cfg, const fs::path& out) {
  const TileRegion& tile = src.tiles[tile_index];
  std::string stem = src.name;
  std::replace(stem.begin(), stem.end(), '.', '_');
  const std::string base = stem + "_t" + std::to_string(tile_index);
  const std::uint64_t seed = mix_seed(mix_seed(cfg.seed, hash_name(src.name)), tile_index);

  ManifestEntry proto;
  proto.source = src.name;
  proto.tile = tile;
  proto.split = split;
  proto.post = cfg.post;
  proto.seed = seed;

  std::vector<ManifestEntry> entries;
  const RasterImage crop_img = crop(*src.image, tile);

  if (cfg.include_pristine) {
    ManifestEntry e = proto;
    e.id = base + "_pristine";
    try {
      SeamMask mask(crop_img.height(), crop_img.width());
      auto [bytes, ext] = encode_sample(crop_img, mask, cfg.post);
      e.image_path = "images/" + e.id + ext;
      e.mask_path = "masks/" + e.id + ".png";
      write_file(out / e.image_path, bytes);
      write_file(out / e.mask_path, encode_seam_mask(mask));
    } catch (const std::exception& ex) {
      e.status = std::string("error: ") + ex.what();
    }
    entries.push_back(std::move(e));
  }

  ManifestEntry e = proto;
  e.id = base + "_forged";
  ForgeryRecipe recipe;
  recipe.kind = ForgeryKind::retarget;
  recipe.ratio = cfg.ratio;
  recipe.variant = cfg.variant;
  recipe.seed = seed;
  e.recipe = recipe;
  try {
    const ForgeryResult res = retarget_forgery(crop_img, cfg.ratio, cfg.variant, seed);
    e.seams_removed = static_cast<Index>(res.seams_removed.size());
    e.seams_inserted = static_cast<Index>(res.seams_inserted.size());
    SeamMask mask = res.gt;
    auto [bytes, ext] = encode_sample(res.forged, mask, cfg.post);
    e.image_path = "images/" + e.id + ext;
    e.mask_path = "masks/" + e.id + ".png";
    e.seams_path = "masks/" + e.id + ".seams.json";
    write_file(out / e.image_path, bytes);
    write_file(out / e.mask_path, encode_seam_mask(mask));
    const std::string seams = trajectories_to_json(res).dump();
    write_file(out / e.seams_path, std::span(reinterpret_cast<const std::uint8_t*>(seams.data()), seams.size()));
  } catch (const std::exception& ex) {
    e.status = std::string("error: ") + ex.what();
  }
  entries.push_back(std::move(e));
  return entries;
}

}  // namespace

DatasetManifest generate_dataset(const fs::path& sources, const fs::path& out, const DatasetConfig& cfg) {
  if (!fs::is_directory(sources)) throw DatasetError("source directory not found: " + sources.string());
  if (cfg.tile_size < 1) throw DatasetError("tile size must be positive");
  if (!(cfg.ratio > 0.0 && cfg.ratio <= 0.5)) throw DatasetError("ratio must lie in (0, 0.5]");

  DatasetManifest manifest;
  std::vector<Source> srcs;
  for (const auto& entry : fs::directory_iterator(sources))
    if (entry.is_regular_file() && is_image_file(entry.path()))
      srcs.push_back({entry.path().filename().string(), entry.path().stem().string(), std::nullopt, {}, {}});
  std::sort(srcs.begin(), srcs.end(), [](const Source& a, const Source& b) { return a.name < b.name; });

  fs::create_directories(out / "images");
  fs::create_directories(out / "masks");
  fs::create_directories(out / "manifest");

  std::map<std::string, Split> splits;
  if (srcs.empty()) {
    manifest.warnings.push_back("no source images found in " + sources.string());
  } else {
    std::vector<std::string> groups;
    for (const auto& s : srcs) groups.push_back(s.group);
    splits = assign_splits(groups, cfg.splits, mix_seed(cfg.seed, 0x5b1175ULL));
  }

  std::vector<WorkItem> items;
  for (std::size_t i = 0; i < srcs.size(); ++i) {
    auto& s = srcs[i];
    try {
      s.image = decode_image(read_file(sources / s.name), DecodeOptions{true});
      s.tiles = extract_tiles(s.image->height(), s.image->width(), cfg.tile_size, cfg.strategy,
                              cfg.tiles_per_image, mix_seed(cfg.seed, hash_name(s.name)));
    } catch (const std::exception& ex) {
      s.error = ex.what();
      continue;
    }
    for (std::size_t t = 0; t < s.tiles.size(); ++t) items.push_back({i, t});
  }

  std::vector<std::vector<ManifestEntry>> results(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < items.size(); k = next++) {
      const auto& it = items[k];
      const auto& s = srcs[it.source];
      results[k] = run_item(s, it.tile, splits.at(s.group), cfg, out);
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::size_t k = 0;
  for (std::size_t i = 0; i < srcs.size(); ++i) {
    const auto& s = srcs[i];
    if (!s.error.empty()) {
      ManifestEntry e;
      e.id = s.name;
      e.source = s.name;
      e.split = splits.at(s.group);
      e.seed = mix_seed(cfg.seed, hash_name(s.name));
      e.status = "error: " + s.error;
      manifest.entries.push_back(std::move(e));
      continue;
    }
    for (; k < items.size() && items[k].source == i; ++k)
      for (auto& e : results[k]) manifest.entries.push_back(std::move(e));
  }

  std::string text;
  for (const auto& e : manifest.entries) text += manifest_line(e) + "\n";
  write_file(out / "manifest" / "manifest.jsonl",
             std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return manifest;
}

}  // namespace seamforge
