#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tframe/metrics.hpp"

using namespace tframe;

TEST_CASE("psnr closed-form cases") {
  ImageBuffer a(16, 16, std::uint8_t{100});
  CHECK(std::isinf(psnr(a, a)));

  ImageBuffer b(16, 16, std::uint8_t{101});  // MSE = 1
  CHECK(psnr(a, b) == Catch::Approx(48.1308).margin(1e-3));

  ImageBuffer black(16, 16, std::uint8_t{0});
  ImageBuffer white(16, 16, std::uint8_t{255});
  CHECK(psnr(black, white) == Catch::Approx(0.0).margin(1e-12));

  CHECK_THROWS_AS(psnr(a, ImageBuffer(8, 8)), std::invalid_argument);
}

TEST_CASE("psnr is symmetric and decreasing in MSE") {
  std::mt19937 rng(41);
  ImageBuffer a(12, 12), b(12, 12), c(12, 12);
  for (int i = 0; i < 144; ++i) {
    a.samples()[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng());
    b.samples()[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng());
  }
  CHECK(psnr(a, b) == psnr(b, a));
  // c is a strictly worse approximation of a than b is
  for (int i = 0; i < 144; ++i) {
    const int va = a.samples()[static_cast<std::size_t>(i)];
    const int vb = b.samples()[static_cast<std::size_t>(i)];
    c.samples()[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(vb + (vb >= va ? 20 : -20));
  }
  CHECK(mse(a, c) > mse(a, b));
  CHECK(psnr(a, c) < psnr(a, b));
}

TEST_CASE("ssim identity and bounds") {
  std::mt19937 rng(43);
  ImageBuffer a(16, 16);
  for (auto& s : a.samples()) s = static_cast<std::uint8_t>(rng());
  CHECK(ssim(a, a) == 1.0);

  ImageBuffer inv(16, 16);
  for (int i = 0; i < 256; ++i)
    inv.samples()[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(255 - a.samples()[static_cast<std::size_t>(i)]);
  CHECK(ssim(a, inv) < 1.0);
  CHECK(ssim(a, inv) == ssim(inv, a));

  CHECK_THROWS_AS(ssim(a, ImageBuffer(8, 8)), std::invalid_argument);
  CHECK_THROWS_AS(ssim(ImageBuffer(4, 4), ImageBuffer(4, 4)), std::invalid_argument);
}

TEST_CASE("ssim of constant images matches the closed form") {
  // zero variance: only the luminance term remains
  const double mu1 = 100.0, mu2 = 110.0;
  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double expected = (2.0 * mu1 * mu2 + c1) / (mu1 * mu1 + mu2 * mu2 + c1);
  ImageBuffer a(16, 16, std::uint8_t{100});
  ImageBuffer b(16, 16, std::uint8_t{110});
  CHECK(ssim(a, b) == Catch::Approx(expected).margin(1e-6));
}

TEST_CASE("mse_missing restricts to unknown pixels") {
  ImageBuffer a(8, 8, std::uint8_t{50});
  ImageBuffer b = a;
  PixelMask mask(8, 8);
  mask.set_known(3, 3, false);
  mask.set_known(4, 4, false);
  b.at(3, 3) = 60;  // diff 10 on one of two missing pixels
  CHECK(mse_missing(a, b, mask) == Catch::Approx(50.0));
  CHECK_THROWS_AS(mse_missing(a, b, PixelMask(8, 8)), std::invalid_argument);
}
