#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tframe/error.hpp"
#include "tframe/image.hpp"

namespace tframe {

/// Pluggable per-tile algorithm. Implementations must preserve known pixels
/// exactly, assign every unknown pixel, and be deterministic.
class Extrapolator {
 public:
  virtual ~Extrapolator() = default;

  virtual std::string name() const = 0;

  /// Upper bound on how far the output at a pixel can depend on the input,
  /// in Chebyshev distance. nullopt = unbounded.
  virtual std::optional<int> influence_radius() const = 0;

  virtual ImageBuffer extrapolate(const ImageBuffer& image, const PixelMask& mask) const = 0;

  /// Parameters as a wire-safe "key=value,key=value" string.
  virtual std::string params_string() const = 0;
};

struct DiffusionParams {
  int iterations = 32;
};

/// K Jacobi sweeps: each unknown pixel repeatedly takes the average of its
/// in-bounds 4-neighbors' current values, known pixels stay fixed. Unknown
/// pixels start at mid-gray 128, which is also the value kept by pixels with
/// no in-bounds neighbors. Influence radius = K.
inline ImageBuffer diffusion_extrapolate(const ImageBuffer& image, const PixelMask& mask,
                                         const DiffusionParams& params) {
  if (image.width() != mask.width() || image.height() != mask.height())
    throw std::invalid_argument("diffusion_extrapolate: image/mask dimension mismatch");
  if (params.iterations < 1)
    throw std::invalid_argument("diffusion_extrapolate: iterations must be >= 1");
  const int w = image.width();
  const int h = image.height();
  std::vector<double> cur(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      cur[static_cast<std::size_t>(y) * w + x] = mask.known(x, y) ? image.at(x, y) : 128.0;
  std::vector<double> next = cur;
  for (int it = 0; it < params.iterations; ++it) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (mask.known(x, y)) continue;
        double sum = 0.0;
        int cnt = 0;
        if (x > 0) { sum += cur[static_cast<std::size_t>(y) * w + x - 1]; ++cnt; }
        if (x + 1 < w) { sum += cur[static_cast<std::size_t>(y) * w + x + 1]; ++cnt; }
        if (y > 0) { sum += cur[static_cast<std::size_t>(y - 1) * w + x]; ++cnt; }
        if (y + 1 < h) { sum += cur[static_cast<std::size_t>(y + 1) * w + x]; ++cnt; }
        next[static_cast<std::size_t>(y) * w + x] = cnt > 0 ? sum / cnt : 128.0;
      }
    std::swap(cur, next);
  }
  ImageBuffer out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (mask.known(x, y)) {
        out.at(x, y) = image.at(x, y);
      } else {
        const double v = std::floor(cur[static_cast<std::size_t>(y) * w + x] + 0.5);
        out.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      }
    }
  return out;
}

struct FseLiteParams {
  int block_size = 4;
  int support_margin = 8;  // 2 * block_size
  int model_iterations = 100;
  double compensation = 0.5;  // gamma
  double weight_decay = 0.8;  // rho
};

/// Optional instrumentation: weighted residual energy per model iteration,
/// one vector per processed block.
struct FseLiteTrace {
  std::vector<std::vector<double>> residual_energy;
};

namespace detail {

inline void check_fse_params(const FseLiteParams& p) {
  if (p.block_size < 2) throw std::invalid_argument("fse-lite: block_size must be >= 2");
  if (p.support_margin < 0) throw std::invalid_argument("fse-lite: support_margin must be >= 0");
  if (p.model_iterations < 1) throw std::invalid_argument("fse-lite: model_iterations must be >= 1");
  if (p.compensation <= 0.0 || p.compensation > 1.0)
    throw std::invalid_argument("fse-lite: compensation must be in (0,1]");
  if (p.weight_decay <= 0.0 || p.weight_decay >= 1.0)
    throw std::invalid_argument("fse-lite: weight_decay must be in (0,1)");
}

// Greedy sparse spectral model of one support window. Selects per iteration
// the 2-D DFT basis with the largest weighted correlation magnitude against
// the residual, conjugate pairs jointly so the model stays real, and takes
// gamma times the projection coefficient. Writes model values into the
// unknown pixels of the block.
class FseWindowModel {
 public:
  FseWindowModel(int win_w, int win_h)
      : mw_(win_w), mh_(win_h), bins_(static_cast<std::size_t>(win_w) * win_h),
        weight_dft_(bins_), corr_(bins_), model_(bins_), touched_(bins_, 0),
        tw_x_(make_twiddles(win_w)), tw_y_(make_twiddles(win_h)) {}

  // weights and values are win_w x win_h row-major; values at unknown pixels
  // are ignored (their weight is zero).
  void fit(const std::vector<double>& weights, const std::vector<double>& values,
           const FseLiteParams& p, std::vector<double>* energy_trace) {
    touched_list_.clear();
    std::fill(model_.begin(), model_.end(), std::complex<double>{});
    std::fill(touched_.begin(), touched_.end(), 0);
    dft2(weights, weight_dft_);
    std::vector<double> weighted(bins_);
    for (std::size_t i = 0; i < bins_; ++i) weighted[i] = weights[i] * values[i];
    dft2(weighted, corr_);
    const double wsum = weight_dft_[0].real();
    if (wsum <= 0.0) return;  // fully unknown support, nothing to model

    double energy = 0.0;
    if (energy_trace) {
      for (std::size_t i = 0; i < bins_; ++i) energy += weights[i] * values[i] * values[i];
      energy_trace->push_back(energy);
    }
    std::vector<double> residual;
    if (energy_trace) residual = values;

    for (int it = 0; it < p.model_iterations; ++it) {
      std::size_t best = 0;
      double best_mag = 0.0;
      for (std::size_t i = 0; i < bins_; ++i) {
        const double m = std::norm(corr_[i]);
        if (m > best_mag) {
          best_mag = m;
          best = i;
        }
      }
      if (best_mag == 0.0) break;  // residual already fully captured
      const int u = static_cast<int>(best % mw_);
      const int v = static_cast<int>(best / mw_);
      const int u2 = (mw_ - u) % mw_;
      const int v2 = (mh_ - v) % mh_;
      const bool self_conjugate = (u2 == u && v2 == v);
      const std::complex<double> coeff = p.compensation * corr_[best] / wsum;
      add_to_model(u, v, coeff);
      if (!self_conjugate) add_to_model(u2, v2, std::conj(coeff));
      // Incremental correlation update: subtracting c*phi_uv from the
      // residual shifts the weight spectrum by (u,v).
      for (int l = 0; l < mh_; ++l)
        for (int k = 0; k < mw_; ++k) {
          const std::size_t i = static_cast<std::size_t>(l) * mw_ + k;
          corr_[i] -= coeff * wspec(k - u, l - v);
          if (!self_conjugate) corr_[i] -= std::conj(coeff) * wspec(k - u2, l - v2);
        }
      if (energy_trace) {
        for (int y = 0; y < mh_; ++y)
          for (int x = 0; x < mw_; ++x) {
            std::complex<double> step = coeff * tw_x_[(u * x) % mw_] * tw_y_[(v * y) % mh_];
            double delta = self_conjugate ? step.real() : 2.0 * step.real();
            residual[static_cast<std::size_t>(y) * mw_ + x] -= delta;
          }
        energy = 0.0;
        for (std::size_t i = 0; i < bins_; ++i)
          energy += weights[i] * residual[i] * residual[i];
        energy_trace->push_back(energy);
      }
    }
  }

  // Model value at window-local pixel (x, y); sums only selected bins.
  double evaluate(int x, int y) const {
    std::complex<double> acc{};
    for (std::size_t i : touched_list_) {
      const int k = static_cast<int>(i % mw_);
      const int l = static_cast<int>(i / mw_);
      acc += model_[i] * tw_x_[(k * x) % mw_] * tw_y_[(l * y) % mh_];
    }
    return acc.real();
  }

 private:
  static std::vector<std::complex<double>> make_twiddles(int m) {
    std::vector<std::complex<double>> tw(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double a = 2.0 * std::numbers::pi * i / m;
      tw[static_cast<std::size_t>(i)] = {std::cos(a), std::sin(a)};
    }
    return tw;
  }

  // Forward transform with conj(phi): out(k,l) = sum in(x,y) e^{-j2pi(kx/M + ly/L)}.
  void dft2(const std::vector<double>& in, std::vector<std::complex<double>>& out) const {
    std::vector<std::complex<double>> rows(bins_);
    for (int y = 0; y < mh_; ++y)
      for (int k = 0; k < mw_; ++k) {
        std::complex<double> acc{};
        for (int x = 0; x < mw_; ++x)
          acc += in[static_cast<std::size_t>(y) * mw_ + x] *
                 std::conj(tw_x_[(k * x) % mw_]);
        rows[static_cast<std::size_t>(y) * mw_ + k] = acc;
      }
    for (int k = 0; k < mw_; ++k)
      for (int l = 0; l < mh_; ++l) {
        std::complex<double> acc{};
        for (int y = 0; y < mh_; ++y)
          acc += rows[static_cast<std::size_t>(y) * mw_ + k] *
                 std::conj(tw_y_[(l * y) % mh_]);
        out[static_cast<std::size_t>(l) * mw_ + k] = acc;
      }
  }

  std::complex<double> wspec(int k, int l) const {
    const int kk = ((k % mw_) + mw_) % mw_;
    const int ll = ((l % mh_) + mh_) % mh_;
    return weight_dft_[static_cast<std::size_t>(ll) * mw_ + kk];
  }

  void add_to_model(int u, int v, std::complex<double> c) {
    const std::size_t i = static_cast<std::size_t>(v) * mw_ + u;
    model_[i] += c;
    if (!touched_[i]) {
      touched_[i] = 1;
      touched_list_.push_back(i);
    }
  }

  int mw_, mh_;
  std::size_t bins_;
  std::vector<std::complex<double>> weight_dft_;
  std::vector<std::complex<double>> corr_;
  std::vector<std::complex<double>> model_;
  std::vector<std::uint8_t> touched_;
  std::vector<std::size_t> touched_list_;
  std::vector<std::complex<double>> tw_x_, tw_y_;
};

}  // namespace detail

/// Simplified frequency-selective extrapolation. Processes B x B blocks in
/// raster order; each block with unknown pixels gets a sparse spectral model
/// fitted on its support window (block grown by support_margin, clamped).
/// Weights: 0 for unknown pixels, weight_decay^(Chebyshev distance to the
/// block) otherwise. Supports always read the original image, so the
/// influence radius is bounded by block_size + support_margin.
inline ImageBuffer fse_lite_extrapolate(const ImageBuffer& image, const PixelMask& mask,
                                        const FseLiteParams& params,
                                        FseLiteTrace* trace = nullptr) {
  if (image.width() != mask.width() || image.height() != mask.height())
    throw std::invalid_argument("fse_lite_extrapolate: image/mask dimension mismatch");
  detail::check_fse_params(params);
  const int w = image.width();
  const int h = image.height();
  const int B = params.block_size;
  const int margin = params.support_margin;
  ImageBuffer out = image;

  std::map<std::pair<int, int>, detail::FseWindowModel> model_cache;
  std::vector<double> weights, values;

  for (int by = 0; by < h; by += B)
    for (int bx = 0; bx < w; bx += B) {
      const int bw = std::min(B, w - bx);
      const int bh = std::min(B, h - by);
      bool has_unknown = false;
      for (int y = by; y < by + bh && !has_unknown; ++y)
        for (int x = bx; x < bx + bw; ++x)
          if (!mask.known(x, y)) {
            has_unknown = true;
            break;
          }
      if (!has_unknown) continue;

      const int sx0 = std::max(0, bx - margin);
      const int sy0 = std::max(0, by - margin);
      const int sx1 = std::min(w, bx + bw + margin);
      const int sy1 = std::min(h, by + bh + margin);
      const int sw = sx1 - sx0;
      const int sh = sy1 - sy0;

      auto [it, inserted] = model_cache.try_emplace(std::pair{sw, sh}, sw, sh);
      detail::FseWindowModel& model = it->second;

      weights.assign(static_cast<std::size_t>(sw) * sh, 0.0);
      values.assign(static_cast<std::size_t>(sw) * sh, 0.0);
      for (int y = sy0; y < sy1; ++y)
        for (int x = sx0; x < sx1; ++x) {
          const std::size_t i = static_cast<std::size_t>(y - sy0) * sw + (x - sx0);
          if (!mask.known(x, y)) continue;
          const int dx = std::max({bx - x, x - (bx + bw - 1), 0});
          const int dy = std::max({by - y, y - (by + bh - 1), 0});
          weights[i] = std::pow(params.weight_decay, std::max(dx, dy));
          values[i] = image.at(x, y);
        }

      std::vector<double>* energy = nullptr;
      if (trace) {
        trace->residual_energy.emplace_back();
        energy = &trace->residual_energy.back();
      }
      model.fit(weights, values, params, energy);

      bool all_unknown_support = true;
      for (int y = sy0; y < sy1 && all_unknown_support; ++y)
        for (int x = sx0; x < sx1; ++x)
          if (mask.known(x, y)) {
            all_unknown_support = false;
            break;
          }

      for (int y = by; y < by + bh; ++y)
        for (int x = bx; x < bx + bw; ++x) {
          if (mask.known(x, y)) continue;
          if (all_unknown_support) {
            out.at(x, y) = 128;  // no information anywhere in the support
            continue;
          }
          const double v = std::floor(model.evaluate(x - sx0, y - sy0) + 0.5);
          out.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
    }
  return out;
}

namespace detail {

inline std::map<std::string, std::string> parse_params(const std::string& s) {
  std::map<std::string, std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad parameter item '" + item + "', expected key=value");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

inline int param_int(const std::map<std::string, std::string>& m, const std::string& key,
                     int fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : std::stoi(it->second);
}

inline double param_double(const std::map<std::string, std::string>& m, const std::string& key,
                           double fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : std::stod(it->second);
}

}  // namespace detail

class DiffusionExtrapolator final : public Extrapolator {
 public:
  explicit DiffusionExtrapolator(DiffusionParams params = {}) : params_(params) {}

  std::string name() const override { return "diffusion"; }
  std::optional<int> influence_radius() const override { return params_.iterations; }
  ImageBuffer extrapolate(const ImageBuffer& image, const PixelMask& mask) const override {
    return diffusion_extrapolate(image, mask, params_);
  }
  std::string params_string() const override {
    return "iters=" + std::to_string(params_.iterations);
  }
  const DiffusionParams& params() const { return params_; }

 private:
  DiffusionParams params_;
};

class FseLiteExtrapolator final : public Extrapolator {
 public:
  explicit FseLiteExtrapolator(FseLiteParams params = {}) : params_(params) {
    detail::check_fse_params(params_);
  }

  std::string name() const override { return "fse-lite"; }
  std::optional<int> influence_radius() const override {
    return params_.block_size + params_.support_margin;
  }
  ImageBuffer extrapolate(const ImageBuffer& image, const PixelMask& mask) const override {
    return fse_lite_extrapolate(image, mask, params_);
  }
  std::string params_string() const override {
    std::ostringstream out;
    out << "block=" << params_.block_size << ",margin=" << params_.support_margin
        << ",iters=" << params_.model_iterations << ",gamma=" << params_.compensation
        << ",rho=" << params_.weight_decay;
    return out.str();
  }
  const FseLiteParams& params() const { return params_; }

 private:
  FseLiteParams params_;
};

/// Instantiates a named algorithm; params is a "key=value,..." string whose
/// keys match the algorithm's params_string(). Unknown names list what exists.
inline std::unique_ptr<Extrapolator> registry_lookup(const std::string& name,
                                                     const std::string& params = "") {
  const auto kv = detail::parse_params(params);
  if (name == "diffusion") {
    DiffusionParams p;
    p.iterations = detail::param_int(kv, "iters", p.iterations);
    return std::make_unique<DiffusionExtrapolator>(p);
  }
  if (name == "fse-lite") {
    FseLiteParams p;
    p.block_size = detail::param_int(kv, "block", p.block_size);
    p.support_margin = detail::param_int(kv, "margin", 2 * p.block_size);
    p.model_iterations = detail::param_int(kv, "iters", p.model_iterations);
    p.compensation = detail::param_double(kv, "gamma", p.compensation);
    p.weight_decay = detail::param_double(kv, "rho", p.weight_decay);
    return std::make_unique<FseLiteExtrapolator>(p);
  }
  throw std::invalid_argument("unknown algorithm '" + name +
                              "', available: diffusion, fse-lite");
}

}  // namespace tframe
