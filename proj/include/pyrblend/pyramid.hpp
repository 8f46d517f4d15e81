#pragma once

#include <Eigen/Core>

#include <array>
#include <bit>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pyrblend/errors.hpp"
#include "pyrblend/image.hpp"
#include "pyrblend/kernel.hpp"

namespace pyrblend {

struct LevelDims {
  Eigen::Index width = 0;
  Eigen::Index height = 0;

  friend bool operator==(const LevelDims&, const LevelDims&) = default;
};

/// Mirror index `i` into [0, n) about the boundary pixels (edge not repeated).
inline Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  const Eigen::Index period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

/// Halved extent used by reduce: ceil(n / 2).
inline Eigen::Index reduced_extent(Eigen::Index n) { return (n + 1) / 2; }

/// floor(log2(min(w, h))): the deepest pyramid whose top level is still >= 1x1
/// under the power-of-two bound.
inline int max_levels(Eigen::Index width, Eigen::Index height) {
  const auto m = static_cast<unsigned long long>(std::min(width, height));
  return m == 0 ? 0 : static_cast<int>(std::bit_width(m)) - 1;
}

/// Default depth: two levels short of the maximum, never negative.
inline int default_levels(Eigen::Index width, Eigen::Index height) {
  return std::max(0, max_levels(width, height) - 2);
}

inline void check_levels(Eigen::Index width, Eigen::Index height, int n_levels) {
  const int limit = max_levels(width, height);
  if (n_levels < 0 || n_levels > limit)
    throw TooManyLevels("requested " + std::to_string(n_levels) + " levels, " + std::to_string(width) + "x" +
                        std::to_string(height) + " allows 0.." + std::to_string(limit));
}

namespace detail {

/// Sparse 1-D resampling operator with at most five taps per output sample.
/// Unused taps carry weight 0 and source 0.
template <typename Scalar>
struct AxisStencil {
  Eigen::Index n_in = 0;
  Eigen::Index n_out = 0;
  std::vector<std::array<Eigen::Index, 5>> src;
  std::vector<std::array<Scalar, 5>> weight;
};

template <typename Scalar>
AxisStencil<Scalar> reduce_stencil(Eigen::Index n_in, const Kernel<Scalar>& kernel) {
  AxisStencil<Scalar> s;
  s.n_in = n_in;
  s.n_out = reduced_extent(n_in);
  s.src.resize(static_cast<std::size_t>(s.n_out));
  s.weight.resize(static_cast<std::size_t>(s.n_out));
  for (Eigen::Index i = 0; i < s.n_out; ++i) {
    for (int m = -2; m <= 2; ++m) {
      s.src[i][m + 2] = reflect_index(2 * i + m, n_in);
      s.weight[i][m + 2] = kernel.tap(m);
    }
  }
  return s;
}

// Zero-upsample to n_out, reflect in the fine grid, keep only even (non-zero)
// samples. The x2 per axis gives the x4 of the 2-D expand.
template <typename Scalar>
AxisStencil<Scalar> expand_stencil(Eigen::Index n_in, Eigen::Index n_out, const Kernel<Scalar>& kernel) {
  AxisStencil<Scalar> s;
  s.n_in = n_in;
  s.n_out = n_out;
  s.src.resize(static_cast<std::size_t>(n_out));
  s.weight.resize(static_cast<std::size_t>(n_out));
  for (Eigen::Index i = 0; i < n_out; ++i) {
    int k = 0;
    s.src[i].fill(0);
    s.weight[i].fill(Scalar(0));
    for (int m = -2; m <= 2; ++m) {
      const Eigen::Index j = reflect_index(i - m, n_out);
      if (j % 2 != 0) continue;
      s.src[i][k] = j / 2;
      s.weight[i][k] = Scalar(2) * kernel.tap(m);
      ++k;
    }
  }
  return s;
}

// Resample the column index of every row.
template <typename Scalar>
Plane<Scalar> apply_horizontal(const Plane<Scalar>& in, const AxisStencil<Scalar>& s) {
  Plane<Scalar> out(in.rows(), s.n_out);
  for (Eigen::Index y = 0; y < in.rows(); ++y) {
    const Scalar* row = in.data() + y * in.cols();
    Scalar* dst = out.data() + y * s.n_out;
    for (Eigen::Index i = 0; i < s.n_out; ++i) {
      const auto& src = s.src[i];
      const auto& w = s.weight[i];
      dst[i] = w[0] * row[src[0]] + w[1] * row[src[1]] + w[2] * row[src[2]] + w[3] * row[src[3]] +
               w[4] * row[src[4]];
    }
  }
  return out;
}

// Resample the row index; each output row is a weighted sum of whole input rows.
template <typename Scalar>
Plane<Scalar> apply_vertical(const Plane<Scalar>& in, const AxisStencil<Scalar>& s) {
  Plane<Scalar> out(s.n_out, in.cols());
  for (Eigen::Index i = 0; i < s.n_out; ++i) {
    const auto& src = s.src[i];
    const auto& w = s.weight[i];
    out.row(i) = w[0] * in.row(src[0]) + w[1] * in.row(src[1]) + w[2] * in.row(src[2]) +
                 w[3] * in.row(src[3]) + w[4] * in.row(src[4]);
  }
  return out;
}

}  // namespace detail

/// Blur with the separable kernel and decimate by two on each axis.
/// Output is ceil(w/2) x ceil(h/2); boundaries reflect about the edge pixel.
template <typename Scalar>
Image<Scalar> reduce(const Image<Scalar>& img, const Kernel<Scalar>& kernel) {
  const auto sx = detail::reduce_stencil(img.width(), kernel);
  const auto sy = detail::reduce_stencil(img.height(), kernel);
  std::vector<Plane<Scalar>> out;
  out.reserve(static_cast<std::size_t>(img.channels()));
  for (const auto& p : img.planes()) out.push_back(detail::apply_vertical(detail::apply_horizontal(p, sx), sy));
  return Image<Scalar>(std::move(out));
}

/// Interpolating upsample to (target_width, target_height).
///
/// Each target extent must be 2n-1 or 2n for input extent n; any other size
/// throws TargetDimMismatch.
template <typename Scalar>
Image<Scalar> expand(const Image<Scalar>& img, const Kernel<Scalar>& kernel, Eigen::Index target_width,
                     Eigen::Index target_height) {
  auto legal = [](Eigen::Index n, Eigen::Index t) { return t == 2 * n || (t == 2 * n - 1 && t >= 1); };
  if (!legal(img.width(), target_width) || !legal(img.height(), target_height))
    throw TargetDimMismatch("cannot expand " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                            " to " + std::to_string(target_width) + "x" + std::to_string(target_height));
  const auto sx = detail::expand_stencil(img.width(), target_width, kernel);
  const auto sy = detail::expand_stencil(img.height(), target_height, kernel);
  std::vector<Plane<Scalar>> out;
  out.reserve(static_cast<std::size_t>(img.channels()));
  for (const auto& p : img.planes()) out.push_back(detail::apply_vertical(detail::apply_horizontal(p, sx), sy));
  return Image<Scalar>(std::move(out));
}

template <typename Scalar>
Image<Scalar> expand(const Image<Scalar>& img, const Kernel<Scalar>& kernel, LevelDims target) {
  return expand(img, kernel, target.width, target.height);
}

template <typename Scalar = float>
struct GaussianPyramid {
  std::vector<Image<Scalar>> levels;
  std::vector<LevelDims> level_dims;

  int top_index() const { return static_cast<int>(levels.size()) - 1; }
};

template <typename Scalar = float>
struct LaplacianPyramid {
  std::vector<Image<Scalar>> band_levels;  ///< signed band-pass levels 0..N-1
  Image<Scalar> top;                       ///< residual Gaussian level N
  std::vector<LevelDims> level_dims;       ///< dims of Gaussian levels 0..N

  int n_levels() const { return static_cast<int>(band_levels.size()); }
};

template <typename Scalar>
GaussianPyramid<Scalar> build_gaussian(const Image<Scalar>& img, const Kernel<Scalar>& kernel, int n_levels) {
  check_levels(img.width(), img.height(), n_levels);
  GaussianPyramid<Scalar> gp;
  gp.levels.reserve(static_cast<std::size_t>(n_levels) + 1);
  gp.levels.push_back(img);
  gp.level_dims.push_back({img.width(), img.height()});
  for (int l = 1; l <= n_levels; ++l) {
    gp.levels.push_back(reduce(gp.levels.back(), kernel));
    gp.level_dims.push_back({gp.levels.back().width(), gp.levels.back().height()});
  }
  return gp;
}

template <typename Scalar>
LaplacianPyramid<Scalar> build_laplacian(const Image<Scalar>& img, const Kernel<Scalar>& kernel, int n_levels) {
  auto gp = build_gaussian(img, kernel, n_levels);
  LaplacianPyramid<Scalar> lp;
  lp.level_dims = gp.level_dims;
  lp.band_levels.reserve(static_cast<std::size_t>(n_levels));
  for (int l = 0; l < n_levels; ++l)
    lp.band_levels.push_back(gp.levels[l] - expand(gp.levels[l + 1], kernel, gp.level_dims[l]));
  lp.top = std::move(gp.levels.back());
  return lp;
}

/// Rebuilds the full-resolution image: G_N = top, G_k = L_k + expand(G_{k+1}).
template <typename Scalar>
Image<Scalar> collapse(const LaplacianPyramid<Scalar>& lp, const Kernel<Scalar>& kernel) {
  Image<Scalar> current = lp.top;
  for (int l = lp.n_levels() - 1; l >= 0; --l)
    current = lp.band_levels[l] + expand(current, kernel, lp.level_dims[l]);
  return current;
}

}  // namespace pyrblend
