#include "seamforge/energy.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace seamforge;

TEST_CASE("flat image has no energy") {
  RasterImage img(6, 5, 3, 8);
  for (int ch = 0; ch < 3; ++ch) img.plane(ch).setConstant(0.4);
  CHECK((backward_energy(img) == 0.0).all());
  const auto fc = forward_costs(img);
  CHECK((fc.left == 0.0).all());
  CHECK((fc.up == 0.0).all());
  CHECK((fc.right == 0.0).all());
  CHECK((saliency_energy(img).abs() < 1e-12).all());
}

TEST_CASE("single bright pixel lights its four neighbours") {
  RasterImage img(5, 5, 1, 8);
  img(2, 2) = 1.0;
  const auto e = backward_energy(img);
  for (Index r = 0; r < 5; ++r)
    for (Index c = 0; c < 5; ++c) {
      const bool cross = (std::abs(r - 2) + std::abs(c - 2)) == 1;
      if (cross) CHECK(e(r, c) == doctest::Approx(0.5));
      else CHECK(e(r, c) == 0.0);
    }
}

TEST_CASE("horizontal ramp has constant interior gradient") {
  RasterImage img(3, 6, 1, 8);
  for (Index c = 0; c < 6; ++c) img.plane(0).col(c).setConstant(c * 10 / 255.0);
  const auto e = backward_energy(img);
  for (Index c = 1; c < 5; ++c) CHECK(e(1, c) == doctest::Approx(10 / 255.0));
  CHECK(e(1, 0) == doctest::Approx(5 / 255.0));
}

TEST_CASE("forward costs agree with the adjacency definition") {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index h = oracle::uniform_index(rng, 1, 9);
    const Index w = oracle::uniform_index(rng, 1, 9);
    const int ch = trial % 2 ? 3 : 1;
    const RasterImage img = oracle::random_image(rng, h, w, ch);
    const auto a = forward_costs(img);
    const auto b = oracle::forward_costs_naive(img);
    CHECK(((a.left - b.left).abs() < 1e-12).all());
    CHECK(((a.up - b.up).abs() < 1e-12).all());
    CHECK(((a.right - b.right).abs() < 1e-12).all());
    CHECK((a.left >= a.up).all());
    CHECK((a.right >= a.up).all());
  }
}

TEST_CASE("lab endpoints") {
  RasterImage img(1, 2, 3, 8);
  for (int ch = 0; ch < 3; ++ch) img(0, 1, ch) = 1.0;
  const auto lab = to_lab(img);
  CHECK(lab[0](0, 0) == doctest::Approx(0.0));
  CHECK(lab[0](0, 1) == doctest::Approx(100.0).epsilon(1e-4));
  CHECK(lab[1](0, 1) == doctest::Approx(0.0).epsilon(1e-3));
  CHECK(lab[2](0, 1) == doctest::Approx(0.0).epsilon(1e-3));

  RasterImage gray(1, 1, 1, 8);
  gray(0, 0) = 0.25;
  CHECK(to_lab(gray)[0](0, 0) == 25.0);
}

TEST_CASE("saliency peaks on a distinct patch") {
  RasterImage img(16, 16, 3, 8);
  for (Index r = 6; r < 10; ++r)
    for (Index c = 6; c < 10; ++c) img(r, c, 0) = 1.0;
  const auto e = saliency_energy(img);
  CHECK(e(7, 7) > e(0, 0));
  CHECK(e(7, 7) > 10.0);
  CHECK((e >= 0.0).all());
}

TEST_CASE("energy is generic over the scalar type") {
  Raster<float> img(4, 4, 1, 8);
  img(1, 1) = 1.0f;
  const EnergyMap<float> e = backward_energy(img);
  CHECK(e(0, 1) == doctest::Approx(0.5f));
  CHECK(forward_costs(img).up(1, 0) == doctest::Approx(1.0f));
}

TEST_CASE("mask bias") {
  EnergyMap<double> e = EnergyMap<double>::Constant(3, 3, 2.0);
  BitPlane removal = BitPlane::Zero(3, 3);
  BitPlane protective = BitPlane::Zero(3, 3);
  removal(0, 0) = 1;
  protective(2, 2) = 1;
  const auto b = apply_mask_bias(e, &removal, &protective);
  CHECK(b(0, 0) == kLowBias);
  CHECK(b(2, 2) == kHighBias);
  CHECK(b(1, 1) == 2.0);
  const BitPlane* none = nullptr;
  CHECK((apply_mask_bias(e, none, none) == e).all());

  protective(0, 0) = 1;
  CHECK_THROWS_AS(apply_mask_bias(e, &removal, &protective), RasterError);
  const BitPlane wrong = BitPlane::Zero(2, 3);
  CHECK_THROWS_AS(apply_mask_bias(e, &wrong, none), RasterError);
}
