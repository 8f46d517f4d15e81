#pragma once

// Brute-force references used only by tests. Everything here is double
// precision, materializes the full 5x5 weight table, and does not share code
// with the separable implementation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pyrblend/image.hpp"

namespace oracle {

inline const std::array<double, 5> kBinomialTaps = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

// Mirror by repeated folding; slow but obviously correct.
inline long mirror(long i, long n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

inline std::array<std::array<double, 5>, 5> weights_2d(const std::array<double, 5>& taps = kBinomialTaps) {
  std::array<std::array<double, 5>, 5> w{};
  for (int n = 0; n < 5; ++n)
    for (int m = 0; m < 5; ++m) w[n][m] = taps[n] * taps[m];
  return w;
}

using Grid = std::vector<std::vector<double>>;  // [y][x]

inline Grid to_grid(const pyrblend::Image<float>& img, long c) {
  Grid g(img.height(), std::vector<double>(img.width()));
  for (long y = 0; y < img.height(); ++y)
    for (long x = 0; x < img.width(); ++x) g[y][x] = img(c, y, x);
  return g;
}

// Full 2-D convolution with reflection, then keep every second sample.
inline Grid reduce(const Grid& in) {
  const long h = static_cast<long>(in.size()), w = static_cast<long>(in[0].size());
  const auto wt = weights_2d();
  Grid conv(h, std::vector<double>(w, 0.0));
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x)
      for (int n = -2; n <= 2; ++n)
        for (int m = -2; m <= 2; ++m) conv[y][x] += wt[n + 2][m + 2] * in[mirror(y + n, h)][mirror(x + m, w)];
  Grid out;
  for (long y = 0; y < h; y += 2) {
    out.emplace_back();
    for (long x = 0; x < w; x += 2) out.back().push_back(conv[y][x]);
  }
  return out;
}

// Zero-upsample into th x tw, then convolve with 4 * w(m,n) under reflection.
inline Grid expand(const Grid& in, long tw, long th) {
  const long h = static_cast<long>(in.size()), w = static_cast<long>(in[0].size());
  Grid up(th, std::vector<double>(tw, 0.0));
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x)
      if (2 * y < th && 2 * x < tw) up[2 * y][2 * x] = in[y][x];
  const auto wt = weights_2d();
  Grid out(th, std::vector<double>(tw, 0.0));
  for (long y = 0; y < th; ++y)
    for (long x = 0; x < tw; ++x)
      for (int n = -2; n <= 2; ++n)
        for (int m = -2; m <= 2; ++m)
          out[y][x] += 4.0 * wt[n + 2][m + 2] * up[mirror(y - n, th)][mirror(x - m, tw)];
  return out;
}

inline double max_abs_diff(const Grid& g, const pyrblend::Image<float>& img, long c) {
  double m = 0;
  for (long y = 0; y < img.height(); ++y)
    for (long x = 0; x < img.width(); ++x) m = std::max(m, std::abs(g[y][x] - static_cast<double>(img(c, y, x))));
  return m;
}

inline pyrblend::Image<float> random_image(std::mt19937_64& rng, long w, long h, long channels) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  pyrblend::Image<float> img(w, h, channels);
  for (long c = 0; c < channels; ++c)
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x) img(c, y, x) = u(rng);
  return img;
}

}  // namespace oracle
