// Command-line frontend: tiling plans, tiled extrapolation (local threads or
// TCP master/worker), quality metrics, and benchmark CSV reports.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tframe/tframe.hpp"

namespace {

// Exit codes: 0 success, 2 I/O, 3 protocol/transport, 4 degenerate tiling,
// 1 anything else.
constexpr int kExitIo = 2;
constexpr int kExitProtocol = 3;
constexpr int kExitTiling = 4;

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tframe::IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tframe::IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw tframe::IoError("short write to " + path);
}

struct AlgoFlags {
  std::string algo = "fse-lite";
  int diff_iters = 32;
  int fse_block = 4;
  int fse_margin = -1;  // -1 = 2 * block
  int fse_iters = 100;
  double fse_gamma = 0.5;
  double fse_rho = 0.8;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--algo", algo, "Extrapolation algorithm: diffusion or fse-lite")
        ->check(CLI::IsMember({"diffusion", "fse-lite"}));
    cmd.add_option("--diff-iters", diff_iters, "Diffusion Jacobi iterations");
    cmd.add_option("--fse-block", fse_block, "FSE-lite block size B");
    cmd.add_option("--fse-margin", fse_margin, "FSE-lite support margin (default 2*B)");
    cmd.add_option("--fse-iters", fse_iters, "FSE-lite model iterations");
    cmd.add_option("--fse-gamma", fse_gamma, "FSE-lite compensation factor in (0,1]");
    cmd.add_option("--fse-rho", fse_rho, "FSE-lite weight decay in (0,1)");
  }

  std::string params() const {
    std::ostringstream out;
    if (algo == "diffusion") {
      out << "iters=" << diff_iters;
    } else {
      out << "block=" << fse_block << ",margin="
          << (fse_margin < 0 ? 2 * fse_block : fse_margin) << ",iters=" << fse_iters
          << ",gamma=" << fse_gamma << ",rho=" << fse_rho;
    }
    return out.str();
  }
};

void emit_report(const tframe::BenchReport& report, const std::string& out_path) {
  if (out_path.empty()) {
    tframe::write_csv(report, std::cout);
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw tframe::IoError("cannot open " + out_path + " for writing");
  tframe::write_csv(report, out);
}

// Loads --input/--mask when given, otherwise the seeded standard scene with a
// synthetic scatter mask.
struct SceneArgs {
  std::string input_path;
  std::string mask_path;
  std::uint32_t seed = 1;
  double mask_fraction = 0.62;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--input", input_path, "Input PGM (default: synthetic 512x512 scene)");
    cmd.add_option("--mask", mask_path, "Mask PGM, 0 = pixel to extrapolate");
    cmd.add_option("--seed", seed, "Seed for the synthetic scene and mask");
    cmd.add_option("--mask-fraction", mask_fraction, "Synthetic mask missing fraction")
        ->check(CLI::Range(0.0, 1.0));
  }

  std::pair<tframe::ImageBuffer, tframe::PixelMask> load() const {
    tframe::ImageBuffer image = input_path.empty()
                                    ? tframe::make_standard_scene(seed)
                                    : tframe::read_pgm(read_file(input_path));
    tframe::PixelMask mask =
        mask_path.empty()
            ? tframe::gen_scatter_mask(image.width(), image.height(), mask_fraction, 4, seed + 1)
            : tframe::mask_from_pgm(read_file(mask_path));
    if (mask.width() != image.width() || mask.height() != image.height())
      throw tframe::IoError("mask dimensions do not match the image");
    return {std::move(image), std::move(mask)};
  }
};

int dispatch(CLI::App& app, int argc, char** argv);

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed tiled image extrapolation"};
  app.require_subcommand(1);
  try {
    return dispatch(app, argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const tframe::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const tframe::ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const tframe::TransportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const tframe::TilingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTiling;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

namespace {

int dispatch(CLI::App& app, int argc, char** argv) {
  // tile-plan
  auto* plan_cmd = app.add_subcommand("tile-plan", "Compute a tile layout and its scores");
  int plan_w = 0, plan_h = 0, plan_n = 0;
  std::string plan_strategy = "proposed";
  plan_cmd->add_option("--width", plan_w, "Image width")->required();
  plan_cmd->add_option("--height", plan_h, "Image height")->required();
  plan_cmd->add_option("--tiles", plan_n, "Number of tiles N")->required();
  plan_cmd->add_option("--strategy", plan_strategy, "Tiling strategy")
      ->check(CLI::IsMember({"proposed", "vertical", "optimal"}));

  // extrapolate
  auto* extra_cmd = app.add_subcommand("extrapolate", "Tiled extrapolation of a masked image");
  std::string extra_in, extra_mask, extra_out;
  int extra_tiles = 1, extra_overlap = 32, extra_workers = 0, extra_expect = 0;
  std::string extra_tiling = "proposed", extra_transport = "local", extra_listen;
  AlgoFlags extra_algo;
  extra_cmd->add_option("--input", extra_in, "Input PGM")->required();
  extra_cmd->add_option("--mask", extra_mask, "Mask PGM, 0 = pixel to extrapolate (hole)")
      ->required();
  extra_cmd->add_option("--output", extra_out, "Output PGM")->required();
  extra_cmd->add_option("--tiles", extra_tiles, "Number of tiles N");
  extra_cmd->add_option("--overlap", extra_overlap, "Overlap stripe width d");
  extra_cmd->add_option("--tiling", extra_tiling, "Tiling strategy")
      ->check(CLI::IsMember({"proposed", "vertical", "optimal"}));
  extra_cmd->add_option("--transport", extra_transport, "local or tcp")
      ->check(CLI::IsMember({"local", "tcp"}));
  extra_cmd->add_option("--workers", extra_workers, "Local worker threads (default: tiles)");
  extra_cmd->add_option("--listen", extra_listen, "TCP master listen address host:port");
  extra_cmd->add_option("--expect-workers", extra_expect, "TCP worker connections to await");
  extra_algo.add_to(*extra_cmd);

  // worker
  auto* worker_cmd = app.add_subcommand("worker", "Run a TCP worker");
  std::string worker_connect;
  worker_cmd->add_option("--connect", worker_connect, "Master address host:port")->required();

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR and SSIM between two PGM images");
  std::vector<std::string> metrics_paths;
  std::string metrics_region = "all", metrics_mask;
  metrics_cmd->add_option("images", metrics_paths, "Two PGM paths")->expected(2);
  metrics_cmd->add_option("--region", metrics_region, "PSNR region: all pixels or missing only")
      ->check(CLI::IsMember({"all", "missing"}));
  metrics_cmd->add_option("--mask", metrics_mask, "Mask PGM (required for --region missing)");

  // bench-tiling
  auto* bt_cmd = app.add_subcommand("bench-tiling", "Planning-time sweep");
  int bt_w = 1024, bt_h = 480, bt_max = 32;
  std::string bt_out;
  bt_cmd->add_option("--width", bt_w, "Image width");
  bt_cmd->add_option("--height", bt_h, "Image height");
  bt_cmd->add_option("--max-tiles", bt_max, "Sweep N from 1 to this");
  bt_cmd->add_option("--out", bt_out, "CSV output path (default stdout)");

  // bench-overlap
  auto* bo_cmd = app.add_subcommand("bench-overlap", "Quality versus overlap width");
  SceneArgs bo_scene;
  std::vector<int> bo_d = {0, 1, 2, 4, 8, 16, 32, 64};
  int bo_tiles = 16, bo_workers = 4;
  std::string bo_out;
  AlgoFlags bo_algo;
  bo_scene.add_to(*bo_cmd);
  bo_cmd->add_option("--d-list", bo_d, "Overlap widths to test")->delimiter(',');
  bo_cmd->add_option("--tiles", bo_tiles, "Number of tiles N");
  bo_cmd->add_option("--workers", bo_workers, "Local worker threads");
  bo_cmd->add_option("--out", bo_out, "CSV output path (default stdout)");
  bo_algo.add_to(*bo_cmd);

  // bench-speedup
  auto* bs_cmd = app.add_subcommand("bench-speedup", "Scaling with worker count");
  SceneArgs bs_scene;
  std::vector<int> bs_n = {1, 2, 4};
  int bs_d = 32;
  std::string bs_out;
  AlgoFlags bs_algo;
  bs_scene.add_to(*bs_cmd);
  bs_cmd->add_option("--n-list", bs_n, "Worker/tile counts to test")->delimiter(',');
  bs_cmd->add_option("--overlap", bs_d, "Overlap stripe width d");
  bs_cmd->add_option("--out", bs_out, "CSV output path (default stdout)");
  bs_algo.add_to(*bs_cmd);

  // bench-quality
  auto* bq_cmd = app.add_subcommand("bench-quality", "Tiled versus whole-image quality");
  SceneArgs bq_scene;
  int bq_tiles = 16, bq_d = 32;
  std::string bq_out;
  AlgoFlags bq_algo;
  bq_scene.add_to(*bq_cmd);
  bq_cmd->add_option("--tiles", bq_tiles, "Number of tiles N");
  bq_cmd->add_option("--overlap", bq_d, "Overlap stripe width d");
  bq_cmd->add_option("--out", bq_out, "CSV output path (default stdout)");
  bq_algo.add_to(*bq_cmd);

  // gen-scene / gen-mask: produce reproducible test inputs
  auto* gs_cmd = app.add_subcommand("gen-scene", "Write the synthetic test scene as PGM");
  int gs_w = 512, gs_h = 512;
  std::uint32_t gs_seed = 1;
  std::string gs_out;
  gs_cmd->add_option("--width", gs_w, "Scene width");
  gs_cmd->add_option("--height", gs_h, "Scene height");
  gs_cmd->add_option("--seed", gs_seed, "Scene seed");
  gs_cmd->add_option("--out", gs_out, "Output PGM path")->required();

  auto* gm_cmd = app.add_subcommand("gen-mask", "Write a synthetic scatter mask as PGM");
  int gm_w = 512, gm_h = 512, gm_block = 4;
  double gm_fraction = 0.62;
  std::uint32_t gm_seed = 2;
  std::string gm_out;
  gm_cmd->add_option("--width", gm_w, "Mask width");
  gm_cmd->add_option("--height", gm_h, "Mask height");
  gm_cmd->add_option("--fraction", gm_fraction, "Missing fraction")->check(CLI::Range(0.0, 1.0));
  gm_cmd->add_option("--block", gm_block, "Square hole size");
  gm_cmd->add_option("--seed", gm_seed, "Mask seed");
  gm_cmd->add_option("--out", gm_out, "Output PGM path (0 = hole)")->required();

  app.parse(argc, argv);

  if (plan_cmd->parsed()) {
    using clock = std::chrono::steady_clock;
    const tframe::Strategy s = *tframe::strategy_from_name(plan_strategy);
    const auto t0 = clock::now();
    const tframe::TileLayout layout = tframe::plan(s, plan_w, plan_h, plan_n);
    const auto plan_us =
        std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0).count();
    for (std::size_t i = 0; i < layout.tiles.size(); ++i) {
      const tframe::Rect& t = layout.tiles[i];
      std::printf("%zu,%d,%d,%d,%d\n", i, t.x, t.y, t.w, t.h);
    }
    std::printf("%lld,%s,%lld\n", static_cast<long long>(tframe::interior_boundary(layout)),
                tframe::detail::fmt_double(tframe::area_imbalance(layout)).c_str(),
                static_cast<long long>(plan_us));
    return 0;
  }

  if (extra_cmd->parsed()) {
    const tframe::ImageBuffer image = tframe::read_pgm(read_file(extra_in));
    const tframe::PixelMask mask = tframe::mask_from_pgm(read_file(extra_mask));
    if (mask.width() != image.width() || mask.height() != image.height())
      throw tframe::IoError("mask dimensions do not match the image");
    tframe::MasterConfig config{extra_tiles, extra_overlap,
                                *tframe::strategy_from_name(extra_tiling), extra_algo.algo,
                                extra_algo.params()};
    tframe::ImageBuffer output;
    tframe::RunStats stats;
    if (extra_transport == "local") {
      const std::size_t workers =
          extra_workers > 0 ? static_cast<std::size_t>(extra_workers)
                            : static_cast<std::size_t>(extra_tiles);
      std::tie(output, stats) = tframe::run_local(image, mask, config, workers);
    } else {
      if (extra_listen.empty() || extra_expect < 1)
        throw CLI::ValidationError("--transport tcp requires --listen and --expect-workers");
      tframe::TcpMasterTransport transport(extra_listen,
                                           static_cast<std::size_t>(extra_expect));
      std::tie(output, stats) = tframe::run_master(image, mask, config, transport);
    }
    write_file(extra_out, tframe::write_pgm(output));
    std::fprintf(stderr,
                 "plan %lld us, distribute %lld us, compute %lld us, merge %lld us, "
                 "total %lld us, overhead %lld px\n",
                 static_cast<long long>(stats.plan_us),
                 static_cast<long long>(stats.distribute_us),
                 static_cast<long long>(stats.compute_span_us),
                 static_cast<long long>(stats.merge_us),
                 static_cast<long long>(stats.total_us), stats.overhead_pixels);
    return 0;
  }

  if (worker_cmd->parsed()) {
    // Retry for up to ~30 s so workers may be launched before the master.
    for (int attempt = 0;; ++attempt) {
      try {
        tframe::TcpWorkerEndpoint endpoint(worker_connect);
        tframe::run_worker(endpoint);
        return 0;
      } catch (const tframe::TransportError&) {
        if (attempt >= 150) throw;
        std::this_thread::sleep_for(std::chrono::milliseconds(200));
      }
    }
  }

  if (metrics_cmd->parsed()) {
    const tframe::ImageBuffer a = tframe::read_pgm(read_file(metrics_paths[0]));
    const tframe::ImageBuffer b = tframe::read_pgm(read_file(metrics_paths[1]));
    double psnr_db;
    if (metrics_region == "missing") {
      if (metrics_mask.empty())
        throw CLI::ValidationError("--region missing requires --mask");
      const tframe::PixelMask mask = tframe::mask_from_pgm(read_file(metrics_mask));
      psnr_db = tframe::psnr_from_mse(tframe::mse_missing(a, b, mask));
    } else {
      psnr_db = tframe::psnr(a, b);
    }
    std::printf("%s,%s\n", tframe::detail::fmt_double(psnr_db).c_str(),
                tframe::detail::fmt_double(tframe::ssim(a, b)).c_str());
    return 0;
  }

  if (bt_cmd->parsed()) {
    emit_report(tframe::bench_tiling_time(bt_w, bt_h, bt_max), bt_out);
    return 0;
  }
  if (bo_cmd->parsed()) {
    auto [image, mask] = bo_scene.load();
    emit_report(tframe::bench_overlap(image, mask, bo_d, bo_tiles, bo_workers, bo_algo.algo,
                                      bo_algo.params()),
                bo_out);
    return 0;
  }
  if (bs_cmd->parsed()) {
    auto [image, mask] = bs_scene.load();
    emit_report(tframe::bench_speedup(image, mask, bs_n, bs_d, bs_algo.algo, bs_algo.params()),
                bs_out);
    return 0;
  }
  if (bq_cmd->parsed()) {
    auto [image, mask] = bq_scene.load();
    emit_report(
        tframe::bench_quality_delta(image, mask, bq_tiles, bq_d, bq_algo.algo, bq_algo.params()),
        bq_out);
    return 0;
  }
  if (gs_cmd->parsed()) {
    write_file(gs_out, tframe::write_pgm(tframe::make_scene(gs_w, gs_h, gs_seed)));
    return 0;
  }
  if (gm_cmd->parsed()) {
    write_file(gm_out, tframe::mask_to_pgm(
                           tframe::gen_scatter_mask(gm_w, gm_h, gm_fraction, gm_block, gm_seed)));
    return 0;
  }
  return 0;
}

}  // namespace
