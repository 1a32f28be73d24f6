#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tframe/error.hpp"
#include "tframe/extrapolate.hpp"
#include "tframe/image.hpp"
#include "tframe/overlap.hpp"
#include "tframe/protocol.hpp"
#include "tframe/tiling.hpp"
#include "tframe/transport.hpp"

namespace tframe {

struct TileStats {
  std::uint32_t tile_id = 0;
  std::size_t worker = 0;
  std::int64_t duration_us = 0;  // assign to result, master-side clock
};

struct RunStats {
  std::int64_t plan_us = 0;
  std::int64_t distribute_us = 0;
  std::int64_t compute_span_us = 0;  // end of dispatch to last result
  std::int64_t merge_us = 0;
  std::int64_t total_us = 0;
  long long overhead_pixels = 0;  // sum of halo minus core areas
  std::vector<TileStats> tiles;
};

struct MasterConfig {
  int tiles = 1;
  int overlap = 32;
  Strategy strategy = Strategy::proposed;
  std::string algo = "fse-lite";
  std::string algo_params;
};

namespace detail {

inline std::int64_t us_between(std::chrono::steady_clock::time_point a,
                               std::chrono::steady_clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
}

}  // namespace detail

/// Worker loop: answer each ASSIGN with a RESULT (or an ERROR on failure),
/// exit on SHUTDOWN. Transport errors terminate the loop.
inline void run_worker(WorkerEndpoint& endpoint) {
  for (;;) {
    const WireMessage msg = decode(endpoint.receive());
    if (std::holds_alternative<ShutdownMsg>(msg)) return;
    const auto* assign = std::get_if<AssignMsg>(&msg);
    if (assign == nullptr)
      throw ProtocolError("worker: expected ASSIGN or SHUTDOWN");
    try {
      const auto algo = registry_lookup(assign->algo, assign->params);
      ImageBuffer result = algo->extrapolate(assign->pixels, assign->mask);
      endpoint.send(encode(ResultMsg{assign->tile_id, std::move(result)}));
    } catch (const std::exception& e) {
      endpoint.send(encode(ErrorMsg{assign->tile_id, e.what()}));
    }
  }
}

/// Master pipeline: plan, expand, dispatch every ASSIGN before blocking on
/// any RESULT, collect in arrival order, crop and merge incrementally.
/// Tile i goes to worker (i mod worker_count). The output is bit-identical
/// regardless of arrival order, worker count, or transport.
inline std::pair<ImageBuffer, RunStats> run_master(const ImageBuffer& image,
                                                   const PixelMask& mask,
                                                   const MasterConfig& config,
                                                   Transport& transport) {
  using clock = std::chrono::steady_clock;
  if (image.width() != mask.width() || image.height() != mask.height())
    throw std::invalid_argument("run_master: image/mask dimension mismatch");
  RunStats stats;
  const auto t_start = clock::now();

  const TileLayout layout = plan(config.strategy, image.width(), image.height(), config.tiles);
  const auto t_planned = clock::now();
  stats.plan_us = detail::us_between(t_start, t_planned);

  const std::size_t n_workers = transport.worker_count();
  std::vector<ExpandedTile> expanded;
  expanded.reserve(layout.tiles.size());
  std::vector<clock::time_point> assign_at(layout.tiles.size());
  for (std::size_t i = 0; i < layout.tiles.size(); ++i) {
    const ExpandedTile et = expand(layout.tiles[i], config.overlap,
                                   image.width(), image.height());
    expanded.push_back(et);
    stats.overhead_pixels += et.overhead_pixels();
    auto [pixels, submask] = extract(image, mask, et);
    AssignMsg msg{static_cast<std::uint32_t>(i), et.halo, et.core,
                  config.algo, config.algo_params, std::move(pixels), std::move(submask)};
    assign_at[i] = clock::now();
    transport.send_to(i % n_workers, encode(msg));
  }
  const auto t_dispatched = clock::now();
  stats.distribute_us = detail::us_between(t_planned, t_dispatched);

  ImageBuffer output(image.width(), image.height());
  std::vector<std::uint8_t> done(layout.tiles.size(), 0);
  std::int64_t merge_us = 0;
  auto t_last_result = t_dispatched;
  for (std::size_t received = 0; received < layout.tiles.size(); ++received) {
    auto [worker, frame] = transport.receive_any();
    const auto t_arrived = clock::now();
    const WireMessage msg = decode(frame);
    if (const auto* err = std::get_if<ErrorMsg>(&msg))
      throw Error("worker " + std::to_string(worker) + " failed on tile " +
                  std::to_string(err->tile_id) + ": " + err->text);
    const auto* result = std::get_if<ResultMsg>(&msg);
    if (result == nullptr) throw ProtocolError("master: expected RESULT or ERROR");
    if (result->tile_id >= layout.tiles.size())
      throw ProtocolError("master: RESULT for unknown tile " + std::to_string(result->tile_id));
    if (done[result->tile_id])
      throw ProtocolError("master: duplicate RESULT for tile " + std::to_string(result->tile_id));
    done[result->tile_id] = 1;
    t_last_result = t_arrived;
    stats.tiles.push_back(TileStats{result->tile_id, worker,
                                    detail::us_between(assign_at[result->tile_id], t_arrived)});
    const auto t_merge0 = clock::now();
    const ImageBuffer core = crop_core(result->pixels, expanded[result->tile_id]);
    merge_into(output, expanded[result->tile_id].core, core);
    merge_us += detail::us_between(t_merge0, clock::now());
  }
  stats.compute_span_us = detail::us_between(t_dispatched, t_last_result);
  stats.merge_us = merge_us;

  for (std::size_t w = 0; w < n_workers; ++w) transport.send_to(w, encode(ShutdownMsg{}));
  stats.total_us = detail::us_between(t_start, clock::now());
  return {std::move(output), std::move(stats)};
}

/// Convenience: run a full tiled job on an in-process worker pool.
inline std::pair<ImageBuffer, RunStats> run_local(const ImageBuffer& image,
                                                  const PixelMask& mask,
                                                  const MasterConfig& config,
                                                  std::size_t n_workers) {
  LocalTransport transport(n_workers, [](WorkerEndpoint& ep) {
    try {
      run_worker(ep);
    } catch (const std::exception&) {
      // Worker threads must not escape; the master surfaces failures via
      // ERROR messages or missing results.
    }
  });
  return run_master(image, mask, config, transport);
}

}  // namespace tframe
