#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tframe/extrapolate.hpp"
#include "tframe/image.hpp"
#include "tframe/metrics.hpp"
#include "tframe/pgm.hpp"
#include "tframe/runtime.hpp"
#include "tframe/tiling.hpp"

namespace tframe {

inline constexpr int kBenchSchemaVersion = 1;

struct BenchRow {
  std::string experiment;
  std::string strategy;
  std::string algo;
  int n = 0;
  int d = 0;
  int workers = 0;
  std::int64_t plan_us = 0;
  std::int64_t total_us = 0;
  std::int64_t compute_us = 0;
  std::optional<double> speedup;
  std::optional<double> psnr_db;
  std::optional<double> ssim_value;
  long long overhead_pixels = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

namespace detail {

// Locale-independent decimal formatting.
inline std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 6);
  return std::string(buf, res.ptr);
}

inline std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string{};
}

}  // namespace detail

inline void write_csv(const BenchReport& report, std::ostream& out) {
  out << "schema_version,experiment,strategy,algo,n,d,workers,plan_us,total_us,"
         "compute_us,speedup,psnr_db,ssim,overhead_pixels\n";
  for (const BenchRow& r : report.rows) {
    out << kBenchSchemaVersion << ',' << r.experiment << ',' << r.strategy << ',' << r.algo
        << ',' << r.n << ',' << r.d << ',' << r.workers << ',' << r.plan_us << ','
        << r.total_us << ',' << r.compute_us << ',' << detail::fmt_opt(r.speedup) << ','
        << detail::fmt_opt(r.psnr_db) << ',' << detail::fmt_opt(r.ssim_value) << ','
        << r.overhead_pixels << '\n';
  }
}

/// Versioned synthetic test scene: sum of three low-frequency sinusoids over
/// a smooth gradient, parameters drawn from the seed. The generator is part
/// of the external contract; changing it invalidates golden numbers.
inline ImageBuffer make_scene(int width, int height, std::uint32_t seed) {
  std::mt19937 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng()) / 4294967296.0; };
  struct Wave {
    double fx, fy, phase, amp;
  };
  Wave waves[3];
  for (Wave& wv : waves) {
    const double cycles = 2.0 + 6.0 * unit();
    const double angle = 2.0 * std::numbers::pi * unit();
    wv.fx = cycles * std::cos(angle) / width;
    wv.fy = cycles * std::sin(angle) / height;
    wv.phase = 2.0 * std::numbers::pi * unit();
    wv.amp = 20.0 + 15.0 * unit();
  }
  const double gx = 30.0 * (unit() - 0.5);
  const double gy = 30.0 * (unit() - 0.5);
  ImageBuffer img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double v = 128.0 + gx * (static_cast<double>(x) / width - 0.5) +
                 gy * (static_cast<double>(y) / height - 0.5);
      for (const Wave& wv : waves)
        v += wv.amp * std::sin(2.0 * std::numbers::pi * (wv.fx * x + wv.fy * y) + wv.phase);
      img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  return img;
}

/// Default benchmark input: a 512x512 synthetic scene.
inline ImageBuffer make_standard_scene(std::uint32_t seed) { return make_scene(512, 512, seed); }

namespace detail {

template <typename F>
std::int64_t median_time_us(F&& fn, int samples = 11) {
  using clock = std::chrono::steady_clock;
  fn();  // warmup
  std::vector<std::int64_t> times;
  times.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const auto t0 = clock::now();
    fn();
    const auto t1 = clock::now();
    times.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return (times[times.size() / 2] + 500) / 1000;
}

}  // namespace detail

/// Planning-time sweep over N = 1..n_max for all three strategies
/// (optimal capped at N <= 12). Median of 11 runs each.
inline BenchReport bench_tiling_time(int width, int height, int n_max) {
  BenchReport report;
  for (int n = 1; n <= n_max; ++n) {
    for (const Strategy s : {Strategy::proposed, Strategy::vertical, Strategy::optimal}) {
      if (s == Strategy::optimal && n > 12) continue;
      if (s == Strategy::vertical && n > width) continue;
      BenchRow row;
      row.experiment = "tiling-time";
      row.strategy = strategy_name(s);
      row.n = n;
      try {
        long long sink = 0;
        row.plan_us = detail::median_time_us([&] {
          const TileLayout l = plan(s, width, height, n);
          sink += l.tiles.size();
        });
        row.total_us = row.plan_us;
      } catch (const TilingError&) {
        continue;  // degenerate configuration, no row
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

/// PSNR against ground truth as a function of the overlap width d.
inline BenchReport bench_overlap(const ImageBuffer& truth, const PixelMask& mask,
                                 const std::vector<int>& d_list, int tiles, int workers,
                                 const std::string& algo, const std::string& algo_params = "") {
  BenchReport report;
  for (const int d : d_list) {
    MasterConfig config{tiles, d, Strategy::proposed, algo, algo_params};
    auto [output, stats] = run_local(truth, mask, config, static_cast<std::size_t>(workers));
    BenchRow row;
    row.experiment = "overlap";
    row.strategy = strategy_name(config.strategy);
    row.algo = algo;
    row.n = tiles;
    row.d = d;
    row.workers = workers;
    row.plan_us = stats.plan_us;
    row.total_us = stats.total_us;
    row.compute_us = stats.compute_span_us;
    row.psnr_db = psnr(truth, output);
    row.ssim_value = ssim(truth, output);
    row.overhead_pixels = stats.overhead_pixels;
    report.rows.push_back(std::move(row));
  }
  return report;
}

/// Wall time and speedup with N = n tiles on n workers, versus n = 1.
inline BenchReport bench_speedup(const ImageBuffer& truth, const PixelMask& mask,
                                 const std::vector<int>& n_list, int d,
                                 const std::string& algo, const std::string& algo_params = "") {
  BenchReport report;
  std::optional<std::int64_t> base_us;
  for (const int n : n_list) {
    MasterConfig config{n, d, Strategy::proposed, algo, algo_params};
    auto [output, stats] = run_local(truth, mask, config, static_cast<std::size_t>(n));
    if (n == 1) base_us = stats.total_us;
    BenchRow row;
    row.experiment = "speedup";
    row.strategy = strategy_name(config.strategy);
    row.algo = algo;
    row.n = n;
    row.d = d;
    row.workers = n;
    row.plan_us = stats.plan_us;
    row.total_us = stats.total_us;
    row.compute_us = stats.compute_span_us;
    if (base_us && stats.total_us > 0)
      row.speedup = static_cast<double>(*base_us) / static_cast<double>(stats.total_us);
    row.psnr_db = psnr(truth, output);
    row.overhead_pixels = stats.overhead_pixels;
    report.rows.push_back(std::move(row));
  }
  return report;
}

/// Tiled versus whole-image quality, both against ground truth, plus deltas.
inline BenchReport bench_quality_delta(const ImageBuffer& truth, const PixelMask& mask,
                                       int tiles, int d, const std::string& algo,
                                       const std::string& algo_params = "") {
  BenchReport report;
  const auto whole_algo = registry_lookup(algo, algo_params);
  const ImageBuffer whole = whole_algo->extrapolate(truth, mask);
  const double whole_psnr = psnr(truth, whole);
  const double whole_ssim = ssim(truth, whole);

  MasterConfig config{tiles, d, Strategy::proposed, algo, algo_params};
  auto [tiled, stats] = run_local(truth, mask, config, static_cast<std::size_t>(tiles));
  const double tiled_psnr = psnr(truth, tiled);
  const double tiled_ssim = ssim(truth, tiled);

  BenchRow whole_row;
  whole_row.experiment = "quality-whole";
  whole_row.algo = algo;
  whole_row.n = 1;
  whole_row.d = 0;
  whole_row.psnr_db = whole_psnr;
  whole_row.ssim_value = whole_ssim;
  report.rows.push_back(std::move(whole_row));

  BenchRow tiled_row;
  tiled_row.experiment = "quality-tiled";
  tiled_row.strategy = strategy_name(config.strategy);
  tiled_row.algo = algo;
  tiled_row.n = tiles;
  tiled_row.d = d;
  tiled_row.workers = tiles;
  tiled_row.plan_us = stats.plan_us;
  tiled_row.total_us = stats.total_us;
  tiled_row.compute_us = stats.compute_span_us;
  tiled_row.psnr_db = tiled_psnr;
  tiled_row.ssim_value = tiled_ssim;
  tiled_row.overhead_pixels = stats.overhead_pixels;
  report.rows.push_back(std::move(tiled_row));

  BenchRow delta_row;
  delta_row.experiment = "quality-delta";
  delta_row.algo = algo;
  delta_row.n = tiles;
  delta_row.d = d;
  delta_row.psnr_db = tiled_psnr - whole_psnr;
  delta_row.ssim_value = tiled_ssim - whole_ssim;
  report.rows.push_back(std::move(delta_row));
  return report;
}

}  // namespace tframe
