#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tframe/error.hpp"
#include "tframe/image.hpp"

namespace tframe {

namespace detail {

// Skips PGM header whitespace including '#' comment lines, then parses one
// unsigned decimal token. pos is advanced past the token.
inline long pgm_token(std::span<const std::uint8_t> bytes, std::size_t& pos,
                      const char* what) {
  for (;;) {
    while (pos < bytes.size() &&
           (bytes[pos] == ' ' || bytes[pos] == '\t' || bytes[pos] == '\r' ||
            bytes[pos] == '\n'))
      ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9')
    throw IoError(std::string("pgm: missing or malformed ") + what + " in header");
  long value = 0;
  while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
    value = value * 10 + (bytes[pos] - '0');
    if (value > 1000000000) throw IoError(std::string("pgm: ") + what + " out of range");
    ++pos;
  }
  return value;
}

}  // namespace detail

/// Decodes a binary (P5) PGM file with maxval 255.
inline ImageBuffer read_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw IoError("pgm: bad magic, expected P5");
  std::size_t pos = 2;
  const long w = detail::pgm_token(bytes, pos, "width");
  const long h = detail::pgm_token(bytes, pos, "height");
  const long maxval = detail::pgm_token(bytes, pos, "maxval");
  if (w < 1 || h < 1) throw IoError("pgm: non-positive dimensions");
  if (maxval != 255)
    throw IoError("pgm: unsupported maxval " + std::to_string(maxval) + ", only 255");
  if (pos >= bytes.size()) throw IoError("pgm: truncated before payload");
  ++pos;  // single whitespace byte after maxval
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < need)
    throw IoError("pgm: truncated payload, need " + std::to_string(need) + " bytes, have " +
                  std::to_string(bytes.size() - pos));
  std::vector<std::uint8_t> samples(bytes.begin() + pos, bytes.begin() + pos + need);
  return ImageBuffer(static_cast<int>(w), static_cast<int>(h), std::move(samples));
}

/// Encodes with the canonical header `P5\n<W> <H>\n255\n`.
inline std::vector<std::uint8_t> write_pgm(const ImageBuffer& image) {
  std::string header = "P5\n" + std::to_string(image.width()) + " " +
                       std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.samples().begin(), image.samples().end());
  return out;
}

/// Mask polarity: sample 0 = unknown, any nonzero = known.
inline PixelMask mask_from_pgm(std::span<const std::uint8_t> bytes) {
  const ImageBuffer img = read_pgm(bytes);
  PixelMask mask(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) mask.set_known(x, y, img.at(x, y) != 0);
  return mask;
}

/// Writes known pixels as 255, unknown as 0.
inline std::vector<std::uint8_t> mask_to_pgm(const PixelMask& mask) {
  ImageBuffer img(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x) img.at(x, y) = mask.known(x, y) ? 255 : 0;
  return write_pgm(img);
}

/// Marks block x block squares unknown at uniformly sampled anchors until the
/// missing fraction reaches the target (overshoot < block^2 / (W*H)).
///
/// Deterministic: uses std::mt19937 (algorithm fixed by the C++ standard) and
/// modulo sampling, so a given (W, H, fraction, block, seed) always yields the
/// same mask on every platform.
inline PixelMask gen_scatter_mask(int width, int height, double target_fraction,
                                  int block, std::uint32_t seed) {
  if (target_fraction < 0.0 || target_fraction > 1.0)
    throw std::invalid_argument("gen_scatter_mask: target fraction must be in [0,1]");
  if (block < 1 || block > width || block > height)
    throw std::invalid_argument("gen_scatter_mask: block must be in [1, min(W,H)]");
  PixelMask mask(width, height);
  const std::size_t total = static_cast<std::size_t>(width) * height;
  const auto target_missing =
      static_cast<std::size_t>(target_fraction * static_cast<double>(total));
  std::mt19937 rng(seed);
  const std::uint32_t ax_range = static_cast<std::uint32_t>(width - block + 1);
  const std::uint32_t ay_range = static_cast<std::uint32_t>(height - block + 1);
  std::size_t missing = 0;
  std::size_t spins = 0;
  while (missing < target_missing) {
    if (++spins > 1000 * total)
      throw std::runtime_error("gen_scatter_mask: did not converge");
    const int ax = static_cast<int>(rng() % ax_range);
    const int ay = static_cast<int>(rng() % ay_range);
    for (int y = ay; y < ay + block; ++y)
      for (int x = ax; x < ax + block; ++x)
        if (mask.known(x, y)) {
          mask.set_known(x, y, false);
          ++missing;
        }
  }
  return mask;
}

}  // namespace tframe
