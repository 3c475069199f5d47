#include "oracles.hpp"

#include <doctest.h>

using namespace seamforge;

TEST_CASE("raster rejects unsupported formats") {
  CHECK_THROWS_AS(RasterImage(4, 4, 2, 8), RasterError);
  CHECK_THROWS_AS(RasterImage(4, 4, 4, 8), RasterError);
  CHECK_THROWS_AS(RasterImage(4, 4, 3, 12), RasterError);
  CHECK_NOTHROW(RasterImage(4, 4, 1, 16));
}

TEST_CASE("planes must agree in shape") {
  std::vector<Plane<double>> planes{Plane<double>::Zero(2, 3), Plane<double>::Zero(3, 2), Plane<double>::Zero(2, 3)};
  CHECK_THROWS_AS(RasterImage(planes, 8), RasterError);
}

TEST_CASE("max code follows bit depth") {
  CHECK(RasterImage(1, 1, 1, 8).max_code() == 255.0);
  CHECK(RasterImage(1, 1, 1, 16).max_code() == 65535.0);
}

TEST_CASE("channel sum adds planes") {
  oracle::Rng rng(1);
  const RasterImage img = oracle::random_image(rng, 5, 7);
  const Plane<double> s = img.channel_sum();
  for (Index r = 0; r < 5; ++r)
    for (Index c = 0; c < 7; ++c) CHECK(s(r, c) == img(r, c, 0) + img(r, c, 1) + img(r, c, 2));
}

TEST_CASE("crop and transpose") {
  oracle::Rng rng(2);
  const RasterImage img = oracle::random_image(rng, 6, 9);
  const RasterImage tile = crop(img, TileRegion{1, 2, 4});
  CHECK(tile.height() == 4);
  CHECK(tile.width() == 4);
  CHECK(tile(3, 3, 2) == img(4, 5, 2));
  CHECK_THROWS_AS(crop(img, TileRegion{3, 0, 4}), RasterError);

  const RasterImage t = transpose(img);
  CHECK(t.height() == 9);
  CHECK(t(8, 5, 1) == img(5, 8, 1));
  CHECK(transpose(t) == img);

  SeamMask m(3, 4);
  m.removed(0, 3) = 1;
  m.inserted(2, 1) = 1;
  const SeamMask mt = transpose(m);
  CHECK(mt.removed(3, 0) == 1);
  CHECK(mt.inserted(1, 2) == 1);
}

TEST_CASE("pixel mask counts") {
  PixelMask m{MaskKind::object, BitPlane::Zero(3, 3)};
  CHECK(m.empty());
  m.bits(1, 1) = 1;
  m.bits(2, 0) = 1;
  CHECK(m.count() == 2);
}
