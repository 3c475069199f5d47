#include "seamforge/cli.hpp"

#include "seamforge/codec.hpp"
#include "seamforge/dataset.hpp"
#include "seamforge/forgery.hpp"
#include "seamforge/metrics.hpp"
#include "seamforge/serialize.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

namespace seamforge {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CarveArgs {
  std::string in;
  std::string out;
  Index width = 0;
  Index height = 0;
  double ratio = 0.0;
  std::string variant = "forward";
  std::string removal_mask;
  std::string protective_mask;
};

struct ForgeArgs {
  std::string in;
  std::string out;
  std::string kind = "retarget";
  double ratio = 0.10;
  std::string variant = "forward";
  std::string removal_mask;
  std::string protective_mask;
  std::string object_mask;
  std::string direction = "left";
  Index shift = 0;
  std::uint64_t seed = 0;
};

struct DatasetArgs {
  std::string sources;
  std::string out;
  Index tile_size = 512;
  Index tiles_per_image = 1;
  bool non_overlapping = false;
  double ratio = 0.10;
  std::string variant = "forward";
  std::string splits = "80:10:10";
  std::vector<std::string> post;
  bool no_pristine = false;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct EvalArgs {
  std::vector<std::string> pred;
  std::vector<std::string> gt;
  std::vector<std::string> trajectories;
  Index buffer = 1;
  std::string layer = "union";
  std::string format = "text";
};

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

std::optional<PixelMask> load_mask(const std::string& path, MaskKind kind, const RasterImage& img) {
  if (path.empty()) return std::nullopt;
  PixelMask m = decode_pixel_mask(read_file(path), kind);
  if (m.height() != img.height() || m.width() != img.width())
    throw UsageError("mask " + path + " does not match the input image dimensions");
  return m;
}

/// Prediction masks: seam-colour files select a layer; anything else counts
/// every non-zero pixel as positive.
BitPlane load_binary(const std::string& path, const std::string& layer) {
  const Bytes bytes = read_file(path);
  const RasterImage img = decode_image(bytes);
  if (img.channels() == 3 && img.bit_depth() == 8) {
    try {
      const SeamMask m = decode_seam_mask(bytes);
      if (layer == "removed") return m.removed;
      if (layer == "inserted") return m.inserted;
      return ((m.removed != 0) || (m.inserted != 0)).cast<std::uint8_t>();
    } catch (const RasterError&) {
      // not a seam-colour file
    }
  }
  return decode_pixel_mask(bytes, MaskKind::object).bits;
}

int carve(const CarveArgs& a, std::ostream& out) {
  const Variant variant = parse_variant(a.variant);
  const RasterImage img = decode_image(read_file(a.in), DecodeOptions{true});
  Index width = a.width > 0 ? a.width : img.width();
  const Index height = a.height > 0 ? a.height : img.height();
  if (a.ratio > 0.0) {
    if (a.ratio >= 1.0) throw UsageError("--ratio must be below 1");
    width = img.width() - seams_for_ratio(a.ratio, img.width());
  }
  const auto removal = load_mask(a.removal_mask, MaskKind::removal, img);
  const auto protective = load_mask(a.protective_mask, MaskKind::protective, img);

  RasterImage result;
  if (removal || protective) {
    if (width > img.width()) throw UsageError("masks are only supported when reducing width");
    CarvingSession session(img);
    SeamMasks masks;
    if (removal) masks.removal = removal->bits;
    if (protective) masks.protective = protective->bits;
    remove_k_seams(session, img.width() - width, variant, masks);
    result = retarget(session.image(), height, width, variant);
  } else {
    result = retarget(img, height, width, variant);
  }
  write_file(a.out, encode_png(result));
  out << "carved " << img.width() << "x" << img.height() << " -> " << result.width() << "x" << result.height()
      << "\n";
  return 0;
}

int forge(const ForgeArgs& a, std::ostream& out) {
  ForgeryRecipe recipe;
  recipe.kind = parse_forgery_kind(a.kind);
  recipe.variant = parse_variant(a.variant);
  recipe.ratio = a.ratio;
  recipe.direction = parse_direction(a.direction);
  recipe.shift = a.shift;
  recipe.seed = a.seed;
  if (recipe.kind == ForgeryKind::retarget && !(a.ratio > 0.0 && a.ratio <= 0.5))
    throw UsageError("--ratio must lie in (0, 0.5]");
  if (recipe.kind == ForgeryKind::object_removal && a.removal_mask.empty())
    throw UsageError("--removal-mask is required for object_removal");
  if (recipe.kind == ForgeryKind::object_displacement) {
    if (a.object_mask.empty()) throw UsageError("--object-mask is required for object_displacement");
    if (a.shift < 1) throw UsageError("--shift must be at least 1");
  }

  const RasterImage img = decode_image(read_file(a.in), DecodeOptions{true});
  recipe.removal = load_mask(a.removal_mask, MaskKind::removal, img);
  recipe.protective = load_mask(a.protective_mask, MaskKind::protective, img);
  recipe.object = load_mask(a.object_mask, MaskKind::object, img);

  const ForgeryResult res = forge(img, recipe);
  fs::create_directories(a.out);
  const fs::path dir(a.out);
  write_file(dir / "forged.png", encode_png(res.forged));
  write_file(dir / "mask.png", encode_seam_mask(res.gt));
  write_file(dir / "seams.json", to_bytes(trajectories_to_json(res).dump()));
  write_file(dir / "recipe.json", to_bytes(recipe_to_json(recipe).dump(2)));
  out << "forged " << res.forged.width() << "x" << res.forged.height() << ": " << res.seams_removed.size()
      << " seams removed, " << res.seams_inserted.size() << " inserted\n";
  return 0;
}

int dataset(const DatasetArgs& a, std::ostream& out, std::ostream& err) {
  DatasetConfig cfg;
  cfg.tile_size = a.tile_size;
  cfg.strategy = a.non_overlapping ? TileStrategy::non_overlapping : TileStrategy::random;
  cfg.tiles_per_image = a.tiles_per_image;
  cfg.ratio = a.ratio;
  cfg.variant = parse_variant(a.variant);
  try {
    cfg.splits = parse_splits(a.splits);
    for (const auto& p : a.post) cfg.post.push_back(parse_post(p));
  } catch (const DatasetError& e) {
    throw UsageError(e.what());
  }
  cfg.include_pristine = !a.no_pristine;
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  if (!(cfg.ratio > 0.0 && cfg.ratio <= 0.5)) throw UsageError("--ratio must lie in (0, 0.5]");
  if (cfg.tile_size < 1) throw UsageError("--tile-size must be positive");
  if (cfg.jobs < 1) throw UsageError("--jobs must be positive");
  if (!fs::is_directory(a.sources)) throw UsageError("--sources is not a directory");

  const DatasetManifest m = generate_dataset(a.sources, a.out, cfg);
  for (const auto& w : m.warnings) err << "warning: " << w << "\n";
  std::size_t failed = 0;
  for (const auto& e : m.entries)
    if (e.status != "ok") ++failed;
  out << "wrote " << m.entries.size() << " entries (" << failed << " failed) to "
      << (fs::path(a.out) / "manifest" / "manifest.jsonl").string() << "\n";
  return 0;
}

void print_text(std::ostream& out, const char* title, const MetricReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-14s accuracy %.6f  precision %.6f  recall %.6f  f1 %.6f  mcc %.6f\n", title,
                r.accuracy, r.precision, r.recall, r.f1, r.mcc);
  out << buf;
}

int eval(const EvalArgs& a, std::ostream& out) {
  if (a.pred.size() != a.gt.size()) throw UsageError("--pred and --gt must be given the same number of times");
  if (!a.trajectories.empty() && a.trajectories.size() != a.gt.size())
    throw UsageError("--trajectories must be given once per --gt");
  if (a.buffer < 0) throw UsageError("--buffer must be non-negative");

  std::vector<ConfusionCounts> plain;
  std::vector<ConfusionCounts> buffered;
  double sls_sum = 0.0;
  std::size_t sls_images = 0;
  for (std::size_t i = 0; i < a.pred.size(); ++i) {
    const BitPlane pred = load_binary(a.pred[i], a.layer);
    const SeamMask gt_mask = decode_seam_mask(read_file(a.gt[i]));
    BitPlane gt;
    if (a.layer == "removed") gt = gt_mask.removed;
    else if (a.layer == "inserted") gt = gt_mask.inserted;
    else gt = ((gt_mask.removed != 0) || (gt_mask.inserted != 0)).cast<std::uint8_t>();
    plain.push_back(confusion_plain(pred, gt));
    buffered.push_back(confusion_buffered(pred, gt, a.buffer));

    if (!a.trajectories.empty()) {
      const Bytes text = read_file(a.trajectories[i]);
      const TrajectoryFile tf = trajectories_from_json(Json::parse(text.begin(), text.end()));
      std::vector<SeamTrajectory> seams;
      if (a.layer != "inserted") seams.insert(seams.end(), tf.removed.begin(), tf.removed.end());
      if (a.layer != "removed") seams.insert(seams.end(), tf.inserted.begin(), tf.inserted.end());
      if (!seams.empty()) {
        sls_sum += sls_image(seams, pred);
        ++sls_images;
      }
    }
  }

  MetricReport plain_report = dataset_aggregate(plain);
  MetricReport buffered_report = dataset_aggregate(buffered);
  buffered_report.buffered = true;
  buffered_report.p = a.buffer;
  if (sls_images > 0) {
    plain_report.sls = sls_sum / static_cast<double>(sls_images);
    buffered_report.sls = plain_report.sls;
  }

  if (a.format == "records") {
    out << to_records(plain_report, "plain") << to_records(buffered_report, "buffered");
  } else {
    print_text(out, "plain", plain_report);
    const std::string title = "buffered(p=" + std::to_string(a.buffer) + ")";
    print_text(out, title.c_str(), buffered_report);
    if (plain_report.sls) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "sls            %.6f\n", *plain_report.sls);
      out << buf;
    }
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seam-carving forgery synthesis and seam-localization evaluation", "seamforge"};
  app.require_subcommand(1);

  const std::vector<std::string> variants{"backward", "forward", "saliency", "merge"};

  CarveArgs carve_args;
  auto* carve_cmd = app.add_subcommand("carve", "Resize an image by seam removal or insertion");
  carve_cmd->add_option("--in", carve_args.in, "Input image")->required()->check(CLI::ExistingFile);
  carve_cmd->add_option("--out", carve_args.out, "Output PNG")->required();
  carve_cmd->add_option("--width", carve_args.width, "Target width");
  carve_cmd->add_option("--height", carve_args.height, "Target height");
  carve_cmd->add_option("--ratio", carve_args.ratio, "Fraction of the width to remove");
  carve_cmd->add_option("--variant", carve_args.variant)->check(CLI::IsMember(variants));
  carve_cmd->add_option("--removal-mask", carve_args.removal_mask)->check(CLI::ExistingFile);
  carve_cmd->add_option("--protective-mask", carve_args.protective_mask)->check(CLI::ExistingFile);

  ForgeArgs forge_args;
  auto* forge_cmd = app.add_subcommand("forge", "Apply a forgery recipe and write the ground-truth mask");
  forge_cmd->add_option("--in", forge_args.in, "Input image")->required()->check(CLI::ExistingFile);
  forge_cmd->add_option("--out", forge_args.out, "Output directory")->required();
  forge_cmd->add_option("--kind", forge_args.kind)
      ->check(CLI::IsMember({"retarget", "object_removal", "object_displacement", "removal", "displacement"}));
  forge_cmd->add_option("--ratio", forge_args.ratio);
  forge_cmd->add_option("--variant", forge_args.variant)->check(CLI::IsMember(variants));
  forge_cmd->add_option("--removal-mask", forge_args.removal_mask)->check(CLI::ExistingFile);
  forge_cmd->add_option("--protective-mask", forge_args.protective_mask)->check(CLI::ExistingFile);
  forge_cmd->add_option("--object-mask", forge_args.object_mask)->check(CLI::ExistingFile);
  forge_cmd->add_option("--direction", forge_args.direction)->check(CLI::IsMember({"left", "right", "up", "down"}));
  forge_cmd->add_option("--shift", forge_args.shift);
  forge_cmd->add_option("--seed", forge_args.seed);

  DatasetArgs ds_args;
  auto* ds_cmd = app.add_subcommand("dataset", "Generate a tiled forgery dataset with a manifest");
  ds_cmd->add_option("--sources", ds_args.sources, "Directory of source images")->required();
  ds_cmd->add_option("--out", ds_args.out, "Output directory")->required();
  ds_cmd->add_option("--tile-size", ds_args.tile_size);
  ds_cmd->add_option("--tiles-per-image", ds_args.tiles_per_image, "Random tiles per source image");
  ds_cmd->add_flag("--non-overlapping", ds_args.non_overlapping, "Tile each source on a regular grid");
  ds_cmd->add_option("--ratio", ds_args.ratio);
  ds_cmd->add_option("--variant", ds_args.variant)->check(CLI::IsMember(variants));
  ds_cmd->add_option("--splits", ds_args.splits, "train:val:test, e.g. 80:10:10");
  ds_cmd->add_option("--post", ds_args.post, "jpeg:<q> or rotate:<deg>, repeatable");
  ds_cmd->add_flag("--no-pristine", ds_args.no_pristine, "Only emit forged samples");
  ds_cmd->add_option("--seed", ds_args.seed);
  ds_cmd->add_option("--jobs", ds_args.jobs);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score prediction masks against ground-truth seam masks");
  eval_cmd->add_option("--pred", eval_args.pred, "Prediction mask, repeatable")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gt", eval_args.gt, "Ground-truth seam mask, repeatable")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--trajectories", eval_args.trajectories, "seams.json per --gt")->check(CLI::ExistingFile);
  eval_cmd->add_option("--buffer", eval_args.buffer, "Buffer radius p in pixels");
  eval_cmd->add_option("--layer", eval_args.layer)->check(CLI::IsMember({"removed", "inserted", "union"}));
  eval_cmd->add_option("--format", eval_args.format)->check(CLI::IsMember({"text", "records"}));

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*carve_cmd) return carve(carve_args, out);
    if (*forge_cmd) return forge(forge_args, out);
    if (*ds_cmd) return dataset(ds_args, out, err);
    if (*eval_cmd) return eval(eval_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace seamforge
