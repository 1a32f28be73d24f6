#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tframe/image.hpp"
#include "tframe/tiling.hpp"

namespace tframe {

/// A core tile together with its halo: the core grown by the overlap stripe d
/// on each side, clamped to the image bounds.
struct ExpandedTile {
  Rect core;
  Rect halo;
  int d = 0;

  long long overhead_pixels() const { return halo.area() - core.area(); }
  bool operator==(const ExpandedTile&) const = default;
};

inline ExpandedTile expand(const Rect& tile, int d, int image_w, int image_h) {
  if (d < 0) throw std::invalid_argument("expand: overlap d must be >= 0");
  if (tile.x < 0 || tile.y < 0 || tile.x + tile.w > image_w || tile.y + tile.h > image_h)
    throw std::invalid_argument("expand: tile exceeds image bounds");
  const int x0 = std::max(0, tile.x - d);
  const int y0 = std::max(0, tile.y - d);
  const int x1 = std::min(image_w, tile.x + tile.w + d);
  const int y1 = std::min(image_h, tile.y + tile.h + d);
  return ExpandedTile{tile, Rect{x0, y0, x1 - x0, y1 - y0}, d};
}

/// Copies the halo region of image and mask.
inline std::pair<ImageBuffer, PixelMask> extract(const ImageBuffer& image,
                                                 const PixelMask& mask,
                                                 const ExpandedTile& et) {
  const Rect& h = et.halo;
  ImageBuffer sub(h.w, h.h);
  PixelMask submask(h.w, h.h);
  for (int y = 0; y < h.h; ++y)
    for (int x = 0; x < h.w; ++x) {
      sub.at(x, y) = image.at(h.x + x, h.y + y);
      submask.set_known(x, y, mask.known(h.x + x, h.y + y));
    }
  return {std::move(sub), std::move(submask)};
}

/// Cuts the core region back out of a processed halo-sized tile.
inline ImageBuffer crop_core(const ImageBuffer& processed, const ExpandedTile& et) {
  if (processed.width() != et.halo.w || processed.height() != et.halo.h)
    throw std::invalid_argument("crop_core: processed tile is " +
                                std::to_string(processed.width()) + "x" +
                                std::to_string(processed.height()) + ", halo is " +
                                std::to_string(et.halo.w) + "x" + std::to_string(et.halo.h));
  const int ox = et.core.x - et.halo.x;
  const int oy = et.core.y - et.halo.y;
  ImageBuffer out(et.core.w, et.core.h);
  for (int y = 0; y < et.core.h; ++y)
    for (int x = 0; x < et.core.w; ++x) out.at(x, y) = processed.at(ox + x, oy + y);
  return out;
}

/// Writes one core into the output image at its tile position.
inline void merge_into(ImageBuffer& out, const Rect& tile, const ImageBuffer& core) {
  if (core.width() != tile.w || core.height() != tile.h)
    throw std::invalid_argument("merge: core dimensions do not match its tile");
  for (int y = 0; y < tile.h; ++y)
    for (int x = 0; x < tile.w; ++x) out.at(tile.x + x, tile.y + y) = core.at(x, y);
}

/// Assembles the output image from per-tile cores. Order independent since
/// cores are disjoint and cover the image exactly.
inline ImageBuffer merge(const TileLayout& layout, const std::vector<ImageBuffer>& cores) {
  if (cores.size() != layout.tiles.size())
    throw std::invalid_argument("merge: got " + std::to_string(cores.size()) + " cores for " +
                                std::to_string(layout.tiles.size()) + " tiles");
  ImageBuffer out(layout.image_w, layout.image_h);
  for (std::size_t i = 0; i < cores.size(); ++i) merge_into(out, layout.tiles[i], cores[i]);
  return out;
}

}  // namespace tframe
