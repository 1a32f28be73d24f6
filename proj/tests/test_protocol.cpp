#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tframe/pgm.hpp"
#include "tframe/protocol.hpp"

using namespace tframe;

namespace {

AssignMsg random_assign(std::mt19937& rng, int max_dim = 32) {
  const int w = 1 + static_cast<int>(rng() % max_dim);
  const int h = 1 + static_cast<int>(rng() % max_dim);
  ImageBuffer pixels(w, h);
  for (auto& s : pixels.samples()) s = static_cast<std::uint8_t>(rng());
  PixelMask mask(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) mask.set_known(x, y, rng() % 3 != 0);
  AssignMsg m;
  m.tile_id = rng() % 1000;
  m.halo = Rect{static_cast<int>(rng() % 100), static_cast<int>(rng() % 100), w, h};
  m.core = Rect{m.halo.x, m.halo.y, std::max(1, w / 2), std::max(1, h / 2)};
  m.algo = rng() % 2 ? "diffusion" : "fse-lite";
  m.params = "iters=" + std::to_string(rng() % 64);
  m.pixels = std::move(pixels);
  m.mask = std::move(mask);
  return m;
}

}  // namespace

TEST_CASE("shutdown encodes to the 10-byte frame") {
  const auto frame = encode(ShutdownMsg{});
  REQUIRE(frame.size() == 10);
  CHECK(frame[0] == 'T');
  CHECK(frame[1] == 'F');
  CHECK(frame[2] == 'R');
  CHECK(frame[3] == 'M');
  CHECK(frame[4] == 1);  // version
  CHECK(frame[6] == 0);  // length 0
  CHECK(frame[9] == 0);
  CHECK(std::holds_alternative<ShutdownMsg>(decode(frame)));
}

TEST_CASE("smallest assign round trips") {
  std::mt19937 rng(1);
  AssignMsg m = random_assign(rng, 2);
  m.halo.w = m.pixels.width();
  const WireMessage rt = decode(encode(m));
  REQUIRE(std::holds_alternative<AssignMsg>(rt));
  CHECK(std::get<AssignMsg>(rt) == m);
}

TEST_CASE("decode rejects corrupted frames with distinct errors") {
  auto frame = encode(ShutdownMsg{});
  frame[0] = 'X';
  CHECK_THROWS_WITH(decode(frame), Catch::Matchers::ContainsSubstring("magic"));

  frame = encode(ShutdownMsg{});
  frame[4] = 9;
  CHECK_THROWS_WITH(decode(frame), Catch::Matchers::ContainsSubstring("version"));

  frame = encode(ShutdownMsg{});
  frame[5] = 200;
  CHECK_THROWS_WITH(decode(frame), Catch::Matchers::ContainsSubstring("variant"));

  frame = encode(ErrorMsg{1, "boom"});
  frame.resize(frame.size() - 2);
  CHECK_THROWS_WITH(decode(frame), Catch::Matchers::ContainsSubstring("truncated"));

  frame = encode(ShutdownMsg{});
  frame.push_back(0);
  CHECK_THROWS_WITH(decode(frame), Catch::Matchers::ContainsSubstring("overrun"));
}

TEST_CASE("round trip holds for generated messages of every variant") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const AssignMsg a = random_assign(rng);
    CHECK(decode(encode(a)) == WireMessage{a});

    ImageBuffer pixels(1 + static_cast<int>(rng() % 40), 1 + static_cast<int>(rng() % 40));
    for (auto& s : pixels.samples()) s = static_cast<std::uint8_t>(rng());
    const ResultMsg r{rng() % 500, pixels};
    CHECK(decode(encode(r)) == WireMessage{r});

    const ErrorMsg e{rng() % 500, std::string(rng() % 64, 'x')};
    CHECK(decode(encode(e)) == WireMessage{e});
  }
}

TEST_CASE("round trip holds up to 1 MiB payloads") {
  std::mt19937 rng(3);
  ImageBuffer pixels(1024, 1024);
  for (auto& s : pixels.samples()) s = static_cast<std::uint8_t>(rng());
  const ResultMsg big{7, pixels};
  const auto frame = encode(big);
  CHECK(frame.size() > (1u << 20));
  CHECK(decode(frame) == WireMessage{big});
}

TEST_CASE("mask bits are row-padded to byte boundaries") {
  // 10 wide -> 2 bytes per row
  PixelMask mask(10, 3);
  mask.set_known(9, 1, false);
  ImageBuffer pixels(10, 3, std::uint8_t{1});
  AssignMsg m;
  m.halo = Rect{0, 0, 10, 3};
  m.core = m.halo;
  m.pixels = pixels;
  m.mask = mask;
  const auto frame = encode(m);
  // payload: 4 + 16 + 16 + 2+0 + 2+0 + 30 pixels + 6 mask bytes
  CHECK(frame.size() == 10 + 4 + 32 + 4 + 30 + 6);
  CHECK(std::get<AssignMsg>(decode(frame)).mask == mask);
}

TEST_CASE("decode never crashes on random bytes") {
  std::mt19937 rng(4);
  int decoded = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    std::vector<std::uint8_t> junk(rng() % 64);
    for (auto& b : junk) b = static_cast<std::uint8_t>(rng());
    if (trial % 3 == 0 && junk.size() >= 6) {
      junk[0] = 'T'; junk[1] = 'F'; junk[2] = 'R'; junk[3] = 'M';
      junk[4] = 1;
      junk[5] = static_cast<std::uint8_t>(1 + rng() % 4);
    }
    try {
      decode(junk);
      ++decoded;
    } catch (const ProtocolError&) {
      // expected for almost all inputs
    }
  }
  CHECK(decoded >= 0);
}
