#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tframe/image.hpp"

namespace tframe {

/// Mean squared error over all pixels.
inline double mse(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument("mse: dimension mismatch");
  double sum = 0.0;
  const auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = static_cast<double>(sa[i]) - static_cast<double>(sb[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(sa.size());
}

/// MSE restricted to pixels the mask marks unknown. Throws if none are.
inline double mse_missing(const ImageBuffer& a, const ImageBuffer& b, const PixelMask& mask) {
  if (a.width() != b.width() || a.height() != b.height() || a.width() != mask.width() ||
      a.height() != mask.height())
    throw std::invalid_argument("mse_missing: dimension mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) {
      if (mask.known(x, y)) continue;
      const double d = static_cast<double>(a.at(x, y)) - static_cast<double>(b.at(x, y));
      sum += d * d;
      ++n;
    }
  if (n == 0) throw std::invalid_argument("mse_missing: mask has no unknown pixels");
  return sum / static_cast<double>(n);
}

inline double psnr_from_mse(double mse_value) {
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse_value);
}

/// 10*log10(255^2 / MSE); identical images give +infinity.
inline double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  return psnr_from_mse(mse(a, b));
}

/// Mean local SSIM with uniform 8x8 windows, stride 1,
/// C1 = (0.01*255)^2, C2 = (0.03*255)^2.
inline double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument("ssim: dimension mismatch");
  constexpr int kWin = 8;
  if (a.width() < kWin || a.height() < kWin)
    throw std::invalid_argument("ssim: image smaller than the 8x8 window");
  constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  constexpr double inv_n = 1.0 / (kWin * kWin);

  double total = 0.0;
  std::size_t windows = 0;
  for (int wy = 0; wy + kWin <= a.height(); ++wy)
    for (int wx = 0; wx + kWin <= a.width(); ++wx) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int y = wy; y < wy + kWin; ++y)
        for (int x = wx; x < wx + kWin; ++x) {
          const double va = a.at(x, y);
          const double vb = b.at(x, y);
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      const double mu_a = sa * inv_n;
      const double mu_b = sb * inv_n;
      const double var_a = saa * inv_n - mu_a * mu_a;
      const double var_b = sbb * inv_n - mu_b * mu_b;
      const double cov = sab * inv_n - mu_a * mu_b;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  return total / static_cast<double>(windows);
}

}  // namespace tframe
