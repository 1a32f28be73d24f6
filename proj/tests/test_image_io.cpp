#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "tframe/pgm.hpp"

using namespace tframe;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header,
                                   const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

}  // namespace

TEST_CASE("read_pgm decodes a minimal file") {
  const auto img = read_pgm(bytes_of("P5\n2 1\n255\n", {0, 255}));
  REQUIRE(img.width() == 2);
  REQUIRE(img.height() == 1);
  CHECK(img.at(0, 0) == 0);
  CHECK(img.at(1, 0) == 255);
}

TEST_CASE("read_pgm accepts comments and odd whitespace in the header") {
  const auto img = read_pgm(bytes_of("P5 # a comment\n# another\n 2\t1 # w h\n255\n", {7, 9}));
  REQUIRE(img.width() == 2);
  CHECK(img.at(0, 0) == 7);
  CHECK(img.at(1, 0) == 9);
}

TEST_CASE("read_pgm reports malformed inputs distinctly") {
  CHECK_THROWS_WITH(read_pgm(bytes_of("P6\n1 1\n255\n", {0})),
                    Catch::Matchers::ContainsSubstring("magic"));
  CHECK_THROWS_WITH(read_pgm(bytes_of("P5\n1 1\n65535\n", {0, 0})),
                    Catch::Matchers::ContainsSubstring("maxval"));
  CHECK_THROWS_WITH(read_pgm(bytes_of("P5\n3 2\n255\n", {0, 1, 2})),
                    Catch::Matchers::ContainsSubstring("truncated"));
  CHECK_THROWS_WITH(read_pgm(bytes_of("P5\nx 1\n255\n", {0})),
                    Catch::Matchers::ContainsSubstring("width"));
}

TEST_CASE("write_pgm emits the canonical header") {
  ImageBuffer img(1, 1);
  img.at(0, 0) = 7;
  const auto bytes = write_pgm(img);
  const std::string header(bytes.begin(), bytes.end() - 1);
  CHECK(header == "P5\n1 1\n255\n");
  CHECK(bytes.back() == 7);
}

TEST_CASE("payload length follows the header exactly") {
  const auto bytes = write_pgm(ImageBuffer(3, 2, std::uint8_t{42}));
  const std::string expect_header = "P5\n3 2\n255\n";
  CHECK(bytes.size() == expect_header.size() + 6);
}

TEST_CASE("pgm round trip is bit-exact over fuzzed files") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 17);
    const int h = 1 + static_cast<int>(rng() % 17);
    std::vector<std::uint8_t> samples(static_cast<std::size_t>(w) * h);
    for (auto& s : samples) s = static_cast<std::uint8_t>(rng());
    const ImageBuffer img(w, h, samples);

    // canonical file round trips to itself
    CHECK(write_pgm(read_pgm(write_pgm(img))) == write_pgm(img));

    // non-canonical header variants decode to the same image
    std::string header = "P5";
    if (rng() % 2) header += " # c\n";
    header += "\n " + std::to_string(w) + (rng() % 2 ? "\t" : " ") + std::to_string(h);
    if (rng() % 2) header += "\n# mid comment\n";
    header += "\n255\n";
    CHECK(read_pgm(bytes_of(header, samples)) == img);
  }
}

TEST_CASE("mask pgm polarity and missing fraction") {
  CHECK(mask_from_pgm(bytes_of("P5\n2 2\n255\n", {255, 255, 255, 255})).missing_fraction() == 0.0);
  CHECK(mask_from_pgm(bytes_of("P5\n2 2\n255\n", {0, 0, 0, 0})).missing_fraction() == 1.0);

  std::vector<std::uint8_t> payload(100, 200);
  for (int i = 0; i < 14; ++i) payload[static_cast<std::size_t>(i) * 7] = 0;
  const auto mask = mask_from_pgm(bytes_of("P5\n10 10\n255\n", payload));
  CHECK(mask.missing_fraction() == Catch::Approx(0.14));

  const auto rt = mask_from_pgm(mask_to_pgm(mask));
  CHECK(rt == mask);
}

TEST_CASE("gen_scatter_mask hits the target fraction") {
  const auto empty = gen_scatter_mask(100, 100, 0.0, 4, 1);
  CHECK(empty.missing_fraction() == 0.0);

  const auto mask = gen_scatter_mask(100, 100, 0.62, 4, 1);
  CHECK(mask.missing_fraction() >= 0.61);
  CHECK(mask.missing_fraction() <= 0.63);
}

TEST_CASE("gen_scatter_mask is a pure function of its arguments") {
  CHECK(gen_scatter_mask(64, 64, 0.3, 3, 99) == gen_scatter_mask(64, 64, 0.3, 3, 99));
  CHECK_FALSE(gen_scatter_mask(64, 64, 0.3, 3, 99) == gen_scatter_mask(64, 64, 0.3, 3, 100));
}

TEST_CASE("gen_scatter_mask rejects bad arguments") {
  CHECK_THROWS_AS(gen_scatter_mask(10, 10, 1.5, 2, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_scatter_mask(10, 10, 0.5, 11, 1), std::invalid_argument);
  CHECK_THROWS_AS(gen_scatter_mask(10, 10, 0.5, 0, 1), std::invalid_argument);
}

TEST_CASE("achieved fraction within 0.01 for images of 10000+ pixels") {
  for (const double target : {0.14, 0.5, 0.62, 0.9}) {
    const auto mask = gen_scatter_mask(100, 100, target, 4, 3);
    CHECK(std::abs(mask.missing_fraction() - target) <= 0.01);
  }
}
