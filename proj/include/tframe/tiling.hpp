#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tframe/error.hpp"

namespace tframe {

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long long area() const { return static_cast<long long>(w) * h; }
  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  bool operator==(const Rect&) const = default;
};

enum class Strategy { proposed, vertical, optimal };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::proposed: return "proposed";
    case Strategy::vertical: return "vertical";
    case Strategy::optimal: return "optimal";
  }
  return "?";
}

inline std::optional<Strategy> strategy_from_name(const std::string& s) {
  if (s == "proposed") return Strategy::proposed;
  if (s == "vertical") return Strategy::vertical;
  if (s == "optimal") return Strategy::optimal;
  return std::nullopt;
}

/// Ordered list of non-overlapping core rectangles exactly covering the image.
struct TileLayout {
  int image_w = 0;
  int image_h = 0;
  std::vector<Rect> tiles;
  Strategy strategy = Strategy::proposed;
  int n = 0;
};

namespace detail {

// Row-structured tiling for landscape orientation (W >= H), per-row tile
// counts and heights chosen so rows of compact, nearly equal tiles result.
inline TileLayout plan_proposed_landscape(int W, int H, int N) {
  TileLayout layout{W, H, {}, Strategy::proposed, N};
  layout.tiles.reserve(static_cast<std::size_t>(N));
  const double r = static_cast<double>(W) / static_cast<double>(H);
  const int n_rows = std::max(
      1, static_cast<int>(std::llround(std::sqrt(static_cast<double>(N) / r))));
  int y = 0;
  for (int i = 1; i <= n_rows; ++i) {
    const int n_cols = (i <= N % n_rows) ? (N + n_rows - 1) / n_rows : N / n_rows;
    if (n_cols < 1)
      throw TilingError("degenerate tiling: row " + std::to_string(i) + " has no tiles");
    long long h = static_cast<long long>(H) * n_cols / N +
                  (static_cast<long long>(H) * n_cols % N) / n_rows;
    if (i == n_rows) h = H - y;  // last row covers the remaining height
    if (h < 1)
      throw TilingError("degenerate tiling: row " + std::to_string(i) +
                        " has height " + std::to_string(h));
    int x = 0;
    for (int j = 1; j <= n_cols; ++j) {
      const int w = (j <= W % n_cols) ? W / n_cols + 1 : W / n_cols;
      if (w < 1)
        throw TilingError("degenerate tiling: tile " + std::to_string(j) + " in row " +
                          std::to_string(i) + " has width " + std::to_string(w));
      layout.tiles.push_back(Rect{x, y, w, static_cast<int>(h)});
      x += w;
    }
    y += static_cast<int>(h);
  }
  if (y != H)
    throw TilingError("degenerate tiling: rows cover " + std::to_string(y) + " of " +
                      std::to_string(H) + " pixels of height");
  return layout;
}

}  // namespace detail

/// Fast compactness-aware tiling: rows of nearly square, nearly equal tiles.
/// Runs in O(N). Portrait inputs are computed transposed and mapped back,
/// with tiles reordered row-major in the original orientation.
inline TileLayout plan_proposed(int W, int H, int N) {
  if (W < 1 || H < 1 || N < 1) throw std::invalid_argument("plan_proposed: W,H,N must be >= 1");
  if (static_cast<long long>(N) > static_cast<long long>(W) * H)
    throw TilingError("degenerate tiling: more tiles than pixels");
  if (W >= H) return detail::plan_proposed_landscape(W, H, N);
  TileLayout t = detail::plan_proposed_landscape(H, W, N);
  TileLayout layout{W, H, {}, Strategy::proposed, N};
  layout.tiles.reserve(t.tiles.size());
  for (const Rect& r : t.tiles) layout.tiles.push_back(Rect{r.y, r.x, r.h, r.w});
  std::sort(layout.tiles.begin(), layout.tiles.end(),
            [](const Rect& a, const Rect& b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
  return layout;
}

/// N full-height stripes; widths differ by at most one, wider stripes first.
inline TileLayout plan_vertical(int W, int H, int N) {
  if (W < 1 || H < 1 || N < 1) throw std::invalid_argument("plan_vertical: W,H,N must be >= 1");
  if (N > W)
    throw TilingError("degenerate tiling: " + std::to_string(N) + " stripes in width " +
                      std::to_string(W));
  TileLayout layout{W, H, {}, Strategy::vertical, N};
  int x = 0;
  for (int j = 1; j <= N; ++j) {
    const int w = (j <= W % N) ? W / N + 1 : W / N;
    layout.tiles.push_back(Rect{x, 0, w, H});
    x += w;
  }
  return layout;
}

namespace detail {

struct GuillotineKey {
  int w, h, n;
  bool operator<(const GuillotineKey& o) const {
    return std::tie(w, h, n) < std::tie(o.w, o.h, o.n);
  }
};

struct GuillotineChoice {
  bool vertical_cut = false;
  int cut = 0;  // split coordinate within the rectangle
  int k = 0;    // tiles assigned to the first part
};

struct GuillotineMemo {
  std::map<GuillotineKey, std::pair<long long, GuillotineChoice>> best;
};

constexpr long long kNoTiling = -1;

// Minimum total interior boundary for splitting a w x h rectangle into n
// tiles with guillotine cuts whose positions respect area proportionality
// within +-1 px. Returns kNoTiling when infeasible.
inline long long guillotine_solve(int w, int h, int n, GuillotineMemo& memo) {
  if (w < 1 || h < 1 || static_cast<long long>(n) > static_cast<long long>(w) * h)
    return kNoTiling;
  if (n == 1) return 0;
  const GuillotineKey key{w, h, n};
  if (auto it = memo.best.find(key); it != memo.best.end()) return it->second.first;

  long long best = kNoTiling;
  GuillotineChoice choice;
  auto consider = [&](bool vertical, int cut, int k, long long a, long long b) {
    if (a == kNoTiling || b == kNoTiling) return;
    const long long cost = (vertical ? h : w) + a + b;
    if (best == kNoTiling || cost < best) {
      best = cost;
      choice = GuillotineChoice{vertical, cut, k};
    }
  };
  // Candidates closest to the ideal proportional cut are visited first, so
  // with a strict-less-than tie-break the centered cut wins ties.
  const auto candidates = [](double ideal, int lo, int hi) {
    std::vector<int> out;
    const int mid = static_cast<int>(std::lround(ideal));
    for (const int c : {mid, mid - 1, mid + 1})
      if (c >= lo && c <= hi && std::abs(c - ideal) <= 1.0) out.push_back(c);
    return out;
  };
  for (int k = 1; k < n; ++k) {
    const double vf = static_cast<double>(w) * k / n;
    for (const int c : candidates(vf, 1, w - 1))
      consider(true, c, k, guillotine_solve(c, h, k, memo),
               guillotine_solve(w - c, h, n - k, memo));
    const double hf = static_cast<double>(h) * k / n;
    for (const int c : candidates(hf, 1, h - 1))
      consider(false, c, k, guillotine_solve(w, c, k, memo),
               guillotine_solve(w, h - c, n - k, memo));
  }
  memo.best[key] = {best, choice};
  return best;
}

inline void guillotine_emit(int x, int y, int w, int h, int n, GuillotineMemo& memo,
                            std::vector<Rect>& out) {
  if (n == 1) {
    out.push_back(Rect{x, y, w, h});
    return;
  }
  const auto& [cost, c] = memo.best.at(GuillotineKey{w, h, n});
  (void)cost;
  if (c.vertical_cut) {
    guillotine_emit(x, y, c.cut, h, c.k, memo, out);
    guillotine_emit(x + c.cut, y, w - c.cut, h, n - c.k, memo, out);
  } else {
    guillotine_emit(x, y, w, c.cut, c.k, memo, out);
    guillotine_emit(x, y + c.cut, w, h - c.cut, n - c.k, memo, out);
  }
}

}  // namespace detail

/// Exhaustive guillotine search minimizing total interior boundary. Optimal
/// within the guillotine family only. Exponential in N; guarded by max_n.
/// Ties prefer vertical cuts, then smaller cut coordinates.
inline TileLayout plan_optimal(int W, int H, int N, int max_n = 12) {
  if (W < 1 || H < 1 || N < 1) throw std::invalid_argument("plan_optimal: W,H,N must be >= 1");
  if (N > max_n)
    throw TilingError("plan_optimal: N=" + std::to_string(N) + " exceeds max_n=" +
                      std::to_string(max_n) + " (brute-force guard)");
  detail::GuillotineMemo memo;
  const long long best = detail::guillotine_solve(W, H, N, memo);
  if (best == detail::kNoTiling)
    throw TilingError("degenerate tiling: no guillotine tiling of " + std::to_string(W) + "x" +
                      std::to_string(H) + " into " + std::to_string(N) + " tiles");
  TileLayout layout{W, H, {}, Strategy::optimal, N};
  detail::guillotine_emit(0, 0, W, H, N, memo, layout.tiles);
  return layout;
}

/// Total length of edges shared between adjacent tiles, each counted once.
inline long long interior_boundary(const TileLayout& layout) {
  long long total = 0;
  const auto& t = layout.tiles;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const Rect& a = t[i];
      const Rect& b = t[j];
      if (a.x + a.w == b.x || b.x + b.w == a.x) {
        const int lo = std::max(a.y, b.y);
        const int hi = std::min(a.y + a.h, b.y + b.h);
        if (hi > lo) total += hi - lo;
      }
      if (a.y + a.h == b.y || b.y + b.h == a.y) {
        const int lo = std::max(a.x, b.x);
        const int hi = std::min(a.x + a.w, b.x + b.w);
        if (hi > lo) total += hi - lo;
      }
    }
  return total;
}

/// (max tile area - min tile area) / mean tile area.
inline double area_imbalance(const TileLayout& layout) {
  long long mn = layout.tiles.front().area();
  long long mx = mn;
  long long sum = 0;
  for (const Rect& t : layout.tiles) {
    mn = std::min(mn, t.area());
    mx = std::max(mx, t.area());
    sum += t.area();
  }
  const double mean = static_cast<double>(sum) / static_cast<double>(layout.tiles.size());
  return static_cast<double>(mx - mn) / mean;
}

/// Checks disjointness, exact cover, and tile count by rasterizing tile ids.
/// Returns std::nullopt when the layout is valid, else a message naming the
/// first violation with coordinates.
inline std::optional<std::string> validate(const TileLayout& layout) {
  if (layout.image_w < 1 || layout.image_h < 1) return "invalid image dimensions";
  if (static_cast<int>(layout.tiles.size()) != layout.n)
    return "tile count " + std::to_string(layout.tiles.size()) + " != n=" +
           std::to_string(layout.n);
  for (std::size_t i = 0; i < layout.tiles.size(); ++i) {
    const Rect& t = layout.tiles[i];
    if (t.w < 1 || t.h < 1)
      return "tile " + std::to_string(i) + " is degenerate (" + std::to_string(t.w) + "x" +
             std::to_string(t.h) + ")";
    if (t.x < 0 || t.y < 0 || t.x + t.w > layout.image_w || t.y + t.h > layout.image_h)
      return "tile " + std::to_string(i) + " exceeds image bounds at (" + std::to_string(t.x) +
             "," + std::to_string(t.y) + ")";
  }
  std::vector<std::uint8_t> cover(
      static_cast<std::size_t>(layout.image_w) * layout.image_h, 0);
  for (const Rect& t : layout.tiles)
    for (int y = t.y; y < t.y + t.h; ++y)
      for (int x = t.x; x < t.x + t.w; ++x) {
        auto& c = cover[static_cast<std::size_t>(y) * layout.image_w + x];
        if (c != 0)
          return "overlap at (" + std::to_string(x) + "," + std::to_string(y) + ")";
        c = 1;
      }
  for (int y = 0; y < layout.image_h; ++y)
    for (int x = 0; x < layout.image_w; ++x)
      if (cover[static_cast<std::size_t>(y) * layout.image_w + x] == 0)
        return "gap at (" + std::to_string(x) + "," + std::to_string(y) + ")";
  return std::nullopt;
}

/// Plans with the given strategy; optimal uses the default brute-force cap.
inline TileLayout plan(Strategy s, int W, int H, int N) {
  switch (s) {
    case Strategy::proposed: return plan_proposed(W, H, N);
    case Strategy::vertical: return plan_vertical(W, H, N);
    case Strategy::optimal: return plan_optimal(W, H, N);
  }
  throw std::invalid_argument("plan: bad strategy");
}

}  // namespace tframe
