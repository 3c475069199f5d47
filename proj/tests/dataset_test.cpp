#include "seamforge/codec.hpp"
#include "seamforge/dataset.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <set>

using namespace seamforge;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("seamforge_dataset_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  const Bytes b = read_file(p);
  return std::string(b.begin(), b.end());
}

}  // namespace

TEST_CASE("post-processing specs") {
  CHECK(parse_post("jpeg:75") == PostProcess{PostProcess::Kind::jpeg, 75, 0.0});
  CHECK(parse_post("rotate:-90").degrees == 270.0);
  CHECK(to_string(parse_post("rotate:45")) == "rotate:45");
  CHECK(to_string(parse_post("jpeg:60")) == "jpeg:60");
  CHECK_THROWS_AS(parse_post("jpeg:101"), DatasetError);
  CHECK_THROWS_AS(parse_post("blur:3"), DatasetError);
  CHECK_THROWS_AS(parse_post("rotate:"), DatasetError);
}

TEST_CASE("right-angle rotations permute pixels") {
  oracle::Rng rng(51);
  const RasterImage img = oracle::random_image(rng, 9, 9);
  CHECK(rotate(img, 0.0) == img);
  RasterImage cur = img;
  for (int i = 0; i < 4; ++i) cur = rotate(cur, 90.0);
  CHECK(cur == img);
  const RasterImage half = rotate(img, 180.0);
  CHECK(half(0, 0, 1) == img(8, 8, 1));
  const RasterImage quarter = rotate(img, 90.0);
  CHECK(quarter(0, 0, 0) == img(0, 8, 0));

  BitPlane m = BitPlane::Zero(5, 5);
  m(0, 4) = 1;
  CHECK(rotate(m, 90.0)(0, 0) == 1);
}

TEST_CASE("arbitrary rotation stays in range") {
  oracle::Rng rng(52);
  const RasterImage img = oracle::textured_image(rng, 20, 30);
  const RasterImage r = rotate(img, 33.0);
  CHECK(r.height() == 20);
  CHECK(r.width() == 30);
  CHECK(r.samples_in_unit_range());
}

TEST_CASE("jpeg quality orders fidelity") {
  oracle::Rng rng(53);
  const RasterImage img = oracle::textured_image(rng, 64, 64);
  double previous = std::numeric_limits<double>::infinity();
  for (int q : {90, 80, 70, 60}) {
    const PostProcess step{PostProcess::Kind::jpeg, q, 0.0};
    const double p = psnr(img, postprocess(img, std::span(&step, 1)));
    CHECK(p < previous);
    previous = p;
  }
  CHECK(psnr(img, img) == std::numeric_limits<double>::infinity());
}

TEST_CASE("tiles") {
  const auto grid = extract_tiles(70, 100, 32, TileStrategy::non_overlapping, 0, 0);
  CHECK(grid.size() == 6);
  std::set<std::pair<Index, Index>> origins;
  for (const auto& t : grid) origins.insert({t.origin_row, t.origin_col});
  CHECK(origins.size() == 6);

  const auto a = extract_tiles(70, 100, 32, TileStrategy::random, 5, 7);
  const auto b = extract_tiles(70, 100, 32, TileStrategy::random, 5, 7);
  CHECK(a == b);
  CHECK(a.size() == 5);
  for (const auto& t : a) CHECK(t.fits(70, 100));
  CHECK_THROWS_AS(extract_tiles(20, 100, 32, TileStrategy::random, 1, 0), DatasetError);
}

TEST_CASE("splits") {
  const SplitRatios r = parse_splits("8:1:1");
  CHECK(r[0] == doctest::Approx(0.8));
  CHECK(r[2] == doctest::Approx(0.1));
  CHECK_THROWS_AS(parse_splits("1:1"), DatasetError);
  CHECK_THROWS_AS(parse_splits("0:0:0"), DatasetError);

  std::vector<std::string> groups;
  for (int i = 0; i < 20; ++i) groups.push_back("g" + std::to_string(i));
  groups.push_back("g3");
  const auto s1 = assign_splits(groups, r, 99);
  const auto s2 = assign_splits(groups, r, 99);
  CHECK(s1 == s2);
  CHECK(s1.size() == 20);
  int counts[3] = {0, 0, 0};
  for (const auto& [g, s] : s1) ++counts[static_cast<int>(s)];
  CHECK(counts[0] == 16);
  CHECK(counts[1] == 2);
  CHECK(counts[2] == 2);
  CHECK(mix_seed(1, 2) != mix_seed(2, 1));
  CHECK(hash_name("a.png") != hash_name("b.png"));
}

TEST_CASE("dataset generation writes a consistent manifest") {
  const fs::path src = fresh_dir("src");
  oracle::Rng rng(54);
  write_file(src / "alpha.png", encode_png(oracle::textured_image(rng, 40, 48)));
  write_file(src / "beta.png", encode_png(oracle::textured_image(rng, 36, 36, 1)));
  const std::string junk = "not an image";
  write_file(src / "broken.png", std::span(reinterpret_cast<const std::uint8_t*>(junk.data()), junk.size()));
  write_file(src / "notes.txt", std::span(reinterpret_cast<const std::uint8_t*>(junk.data()), junk.size()));

  DatasetConfig cfg;
  cfg.tile_size = 32;
  cfg.tiles_per_image = 2;
  cfg.ratio = 0.1;
  cfg.seed = 5;
  cfg.post = {parse_post("rotate:90")};
  const fs::path out = fresh_dir("out");
  const DatasetManifest m = generate_dataset(src, out, cfg);

  REQUIRE(m.entries.size() == 9);
  CHECK(m.entries[0].source == "alpha.png");
  CHECK(m.entries[0].id == "alpha_png_t0_pristine");
  CHECK(m.entries[1].id == "alpha_png_t0_forged");
  CHECK(m.entries[4].source == "beta.png");
  CHECK(m.entries[8].source == "broken.png");
  CHECK(m.entries[8].status.rfind("error", 0) == 0);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto& e = m.entries[i];
    CHECK(e.status == "ok");
    CHECK(fs::exists(out / e.image_path));
    CHECK(fs::exists(out / e.mask_path));
    CHECK(e.recipe.has_value() == (i % 2 == 1));
    if (e.recipe) {
      CHECK(e.seams_removed == 3);
      CHECK(fs::exists(out / e.seams_path));
      const SeamMask gt = decode_seam_mask(read_file(out / e.mask_path));
      CHECK(gt.height() == 32);
      CHECK(oracle::count(gt.inserted) == 3 * 32);
    }
  }
  const std::string manifest = slurp(out / "manifest" / "manifest.jsonl");
  CHECK(std::count(manifest.begin(), manifest.end(), '\n') == 9);
  CHECK(manifest.rfind(manifest_line(m.entries[0]) + "\n", 0) == 0);
}

TEST_CASE("empty source directory yields an empty manifest") {
  const fs::path src = fresh_dir("empty");
  const fs::path out = fresh_dir("empty_out");
  const DatasetManifest m = generate_dataset(src, out, DatasetConfig{});
  CHECK(m.entries.empty());
  CHECK(m.warnings.size() == 1);
  CHECK(fs::file_size(out / "manifest" / "manifest.jsonl") == 0);
  CHECK_THROWS_AS(generate_dataset(src / "missing", out, DatasetConfig{}), DatasetError);
}

TEST_CASE("generation is independent of the job count") {
  const fs::path src = fresh_dir("jobs_src");
  oracle::Rng rng(55);
  for (int i = 0; i < 3; ++i)
    write_file(src / ("img" + std::to_string(i) + ".png"), encode_png(oracle::textured_image(rng, 40, 40)));
  DatasetConfig cfg;
  cfg.tile_size = 24;
  cfg.tiles_per_image = 2;
  cfg.post = {parse_post("jpeg:80")};
  const fs::path a = fresh_dir("jobs_a");
  const fs::path b = fresh_dir("jobs_b");
  generate_dataset(src, a, cfg);
  cfg.jobs = 3;
  generate_dataset(src, b, cfg);
  CHECK(slurp(a / "manifest" / "manifest.jsonl") == slurp(b / "manifest" / "manifest.jsonl"));
  for (const auto& entry : fs::directory_iterator(a / "images"))
    CHECK(read_file(entry.path()) == read_file(b / "images" / entry.path().filename()));
}

TEST_CASE("split edge cases") {
  const SplitRatios r{0.8, 0.1, 0.1};
  std::vector<std::string> ten;
  for (int i = 0; i < 10; ++i) ten.push_back("s" + std::to_string(i));
  int counts[3] = {0, 0, 0};
  for (const auto& [g, s] : assign_splits(ten, r, 3)) ++counts[static_cast<int>(s)];
  CHECK(counts[0] == 8);
  CHECK(counts[1] == 1);
  CHECK(counts[2] == 1);
  CHECK(assign_splits({"only"}, r, 3).at("only") == Split::train);
  CHECK_THROWS_AS(assign_splits({}, r, 3), DatasetError);
}

TEST_CASE("split fractions stay within one group of the ratios") {
  oracle::Rng rng(56);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = oracle::uniform_index(rng, 1, 60);
    std::vector<std::string> groups;
    for (Index i = 0; i < n; ++i) groups.push_back("g" + std::to_string(oracle::uniform_index(rng, 0, 2 * n)));
    std::set<std::string> distinct(groups.begin(), groups.end());
    const double a = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    const double b = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double c = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const SplitRatios r{a / (a + b + c), b / (a + b + c), c / (a + b + c)};
    const auto splits = assign_splits(groups, r, rng());
    CHECK(splits.size() == distinct.size());
    double counts[3] = {0, 0, 0};
    for (const auto& [g, s] : splits) ++counts[static_cast<int>(s)];
    for (int k = 0; k < 3; ++k) CHECK(std::abs(counts[k] - r[k] * double(distinct.size())) <= 1.0 + 1e-9);
  }
}

TEST_CASE("grid tiling arithmetic") {
  const auto one = extract_tiles(512, 512, 512, TileStrategy::non_overlapping, 0, 0);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == TileRegion{0, 0, 512});
  CHECK(extract_tiles(1024, 1024, 512, TileStrategy::non_overlapping, 0, 0).size() == 4);
}

TEST_CASE("empty post-processing chain is the identity") {
  oracle::Rng rng(57);
  const RasterImage img = oracle::random_image(rng, 8, 8);
  CHECK(postprocess(img, {}) == img);
}
