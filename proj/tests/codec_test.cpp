#include "seamforge/codec.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace seamforge;

TEST_CASE("png round trip is lossless at 8 and 16 bits") {
  oracle::Rng rng(3);
  for (int channels : {1, 3}) {
    RasterImage img = oracle::random_image(rng, 7, 11, channels);
    CHECK(decode_image(encode_png(img)) == img);

    RasterImage deep(5, 4, channels, 16);
    for (int ch = 0; ch < channels; ++ch)
      for (Index r = 0; r < 5; ++r)
        for (Index c = 0; c < 4; ++c) deep(r, c, ch) = static_cast<double>((r * 9973 + c * 131 + ch * 7) % 65536) / 65535.0;
    const RasterImage back = decode_image(encode_png(deep));
    CHECK(back.bit_depth() == 16);
    CHECK(back == deep);
  }
}

TEST_CASE("png encoding is deterministic") {
  oracle::Rng rng(4);
  const RasterImage img = oracle::random_image(rng, 16, 16);
  CHECK(encode_png(img) == encode_png(img));
}

TEST_CASE("container sniffing and lossy gate") {
  oracle::Rng rng(5);
  const RasterImage img = oracle::textured_image(rng, 16, 16);
  const Bytes png = encode_png(img);
  const Bytes jpg = encode_jpeg(img, 90);
  CHECK(sniff_container(png) == Container::png);
  CHECK(sniff_container(jpg) == Container::jpeg);
  CHECK_THROWS_AS(decode_image(jpg), RasterError);
  const RasterImage back = decode_image(jpg, DecodeOptions{true});
  CHECK(back.width() == 16);
  CHECK(back.channels() == 3);
  const Bytes junk{1, 2, 3, 4};
  CHECK(sniff_container(junk) == Container::unknown);
  CHECK_THROWS_AS(decode_image(junk), RasterError);
  CHECK_THROWS_AS(encode_jpeg(img, 0), RasterError);
}

TEST_CASE("truncated png is rejected") {
  oracle::Rng rng(6);
  Bytes png = encode_png(oracle::random_image(rng, 8, 8));
  png.resize(png.size() / 2);
  CHECK_THROWS_AS(decode_image(png), RasterError);
}

TEST_CASE("seam mask colours round trip") {
  SeamMask m(4, 5);
  m.removed(0, 1) = 1;
  m.inserted(2, 3) = 1;
  m.removed(3, 4) = 1;
  m.inserted(3, 4) = 1;
  const Bytes png = encode_seam_mask(m);
  const RasterImage rgb = decode_image(png);
  CHECK(rgb(0, 1, 0) == 1.0);
  CHECK(rgb(0, 1, 1) == 0.0);
  CHECK(rgb(2, 3, 1) == 1.0);
  CHECK(rgb(3, 4, 0) == 1.0);
  CHECK(rgb(3, 4, 1) == 1.0);
  CHECK(rgb(3, 4, 2) == 0.0);
  CHECK(decode_seam_mask(png) == m);

  RasterImage bad(2, 2, 3, 8);
  bad(0, 0, 2) = 1.0;
  CHECK_THROWS_AS(decode_seam_mask(encode_png(bad)), RasterError);
}

TEST_CASE("pixel masks treat any nonzero sample as set") {
  RasterImage gray(3, 3, 1, 8);
  gray(1, 2) = 1.0 / 255.0;
  const PixelMask m = decode_pixel_mask(encode_png(gray), MaskKind::removal);
  CHECK(m.kind == MaskKind::removal);
  CHECK(m.count() == 1);
  CHECK(m.bits(1, 2) == 1);
  CHECK(decode_pixel_mask(encode_pixel_mask(m), MaskKind::removal).bits.isApprox(m.bits));
}
