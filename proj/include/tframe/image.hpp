#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tframe {

/// Rectangular grid of 8-bit grayscale samples, row-major.
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(int width, int height, std::uint8_t fill = 0)
      : w_(width), h_(height), samples_(check_dims(width, height), fill) {}

  ImageBuffer(int width, int height, std::vector<std::uint8_t> samples)
      : w_(width), h_(height), samples_(std::move(samples)) {
    if (samples_.size() != check_dims(width, height))
      throw std::invalid_argument("ImageBuffer: sample count does not match dimensions");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  std::size_t size() const { return samples_.size(); }

  std::uint8_t at(int x, int y) const { return samples_[idx(x, y)]; }
  std::uint8_t& at(int x, int y) { return samples_[idx(x, y)]; }

  std::span<const std::uint8_t> samples() const { return samples_; }
  std::span<std::uint8_t> samples() { return samples_; }

  bool operator==(const ImageBuffer&) const = default;

 private:
  static std::size_t check_dims(int w, int h) {
    if (w < 1 || h < 1) throw std::invalid_argument("ImageBuffer: dimensions must be >= 1");
    return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  }
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x);
  }

  int w_ = 0;
  int h_ = 0;
  std::vector<std::uint8_t> samples_;
};

/// Per-pixel known/unknown flags aligned with an ImageBuffer.
/// true = pixel known, false = pixel unknown (to be extrapolated).
class PixelMask {
 public:
  PixelMask() = default;

  PixelMask(int width, int height, bool known = true)
      : w_(width), h_(height),
        flags_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               known ? std::uint8_t{1} : std::uint8_t{0}) {
    if (width < 1 || height < 1) throw std::invalid_argument("PixelMask: dimensions must be >= 1");
  }

  int width() const { return w_; }
  int height() const { return h_; }
  std::size_t size() const { return flags_.size(); }

  bool known(int x, int y) const { return flags_[idx(x, y)] != 0; }
  void set_known(int x, int y, bool known) { flags_[idx(x, y)] = known ? 1 : 0; }

  std::span<const std::uint8_t> flags() const { return flags_; }

  std::size_t unknown_count() const {
    std::size_t n = 0;
    for (auto f : flags_) n += (f == 0);
    return n;
  }

  double missing_fraction() const {
    return static_cast<double>(unknown_count()) / static_cast<double>(flags_.size());
  }

  bool operator==(const PixelMask&) const = default;

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x);
  }

  int w_ = 0;
  int h_ = 0;
  std::vector<std::uint8_t> flags_;
};

}  // namespace tframe
