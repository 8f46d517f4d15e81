#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pyrblend/errors.hpp"

namespace pyrblend {

/// One channel of an image: rows are image rows (y), columns are x.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Planar multi-channel raster.
///
/// Memory layout is channel-major, then row-major within each channel:
/// channel c, row y, column x lives at plane(c)(y, x). Intensities are
/// normalized to [0,1] for loaded images; Laplacian bands are signed and
/// are not clamped.
template <typename Scalar = float>
class Image {
 public:
  using scalar_type = Scalar;
  using plane_type = Plane<Scalar>;

  Image() = default;

  Image(Eigen::Index width, Eigen::Index height, Eigen::Index channels, Scalar fill = Scalar(0)) {
    if (width < 1 || height < 1)
      throw InvalidImage("image dimensions must be at least 1x1");
    if (channels != 1 && channels != 3)
      throw InvalidImage("image must have 1 or 3 channels, got " + std::to_string(channels));
    planes_.assign(static_cast<std::size_t>(channels), plane_type::Constant(height, width, fill));
  }

  explicit Image(std::vector<plane_type> planes) : planes_(std::move(planes)) {
    if (planes_.size() != 1 && planes_.size() != 3)
      throw InvalidImage("image must have 1 or 3 channels");
    for (const auto& p : planes_) {
      if (p.rows() < 1 || p.cols() < 1)
        throw InvalidImage("image dimensions must be at least 1x1");
      if (p.rows() != planes_[0].rows() || p.cols() != planes_[0].cols())
        throw InvalidImage("all planes must share dimensions");
    }
  }

  static Image constant(Eigen::Index width, Eigen::Index height, Eigen::Index channels, Scalar value) {
    return Image(width, height, channels, value);
  }

  Eigen::Index width() const { return planes_.empty() ? 0 : planes_[0].cols(); }
  Eigen::Index height() const { return planes_.empty() ? 0 : planes_[0].rows(); }
  Eigen::Index channels() const { return static_cast<Eigen::Index>(planes_.size()); }
  bool empty() const { return planes_.empty(); }

  const plane_type& plane(Eigen::Index c) const { return planes_[static_cast<std::size_t>(c)]; }
  plane_type& plane(Eigen::Index c) { return planes_[static_cast<std::size_t>(c)]; }

  const std::vector<plane_type>& planes() const { return planes_; }

  Scalar operator()(Eigen::Index c, Eigen::Index y, Eigen::Index x) const { return plane(c)(y, x); }
  Scalar& operator()(Eigen::Index c, Eigen::Index y, Eigen::Index x) { return plane(c)(y, x); }

  bool same_shape(const Image& other) const {
    return width() == other.width() && height() == other.height() && channels() == other.channels();
  }

  template <typename Other>
  Image<Other> cast() const {
    std::vector<Plane<Other>> out;
    out.reserve(planes_.size());
    for (const auto& p : planes_) out.push_back(p.template cast<Other>());
    return Image<Other>(std::move(out));
  }

  bool all_finite() const {
    for (const auto& p : planes_)
      if (!p.allFinite()) return false;
    return true;
  }

 private:
  std::vector<plane_type> planes_;
};

/// Applies `op(plane_a, plane_b)` channel-wise and returns the resulting image.
template <typename Scalar, typename BinaryOp>
Image<Scalar> zip_planes(const Image<Scalar>& a, const Image<Scalar>& b, BinaryOp op) {
  if (!a.same_shape(b)) throw DimMismatch("images differ in shape");
  std::vector<Plane<Scalar>> out;
  out.reserve(static_cast<std::size_t>(a.channels()));
  for (Eigen::Index c = 0; c < a.channels(); ++c) out.push_back(op(a.plane(c), b.plane(c)));
  return Image<Scalar>(std::move(out));
}

template <typename Scalar>
Image<Scalar> operator+(const Image<Scalar>& a, const Image<Scalar>& b) {
  return zip_planes(a, b, [](const auto& x, const auto& y) -> Plane<Scalar> { return x + y; });
}

template <typename Scalar>
Image<Scalar> operator-(const Image<Scalar>& a, const Image<Scalar>& b) {
  return zip_planes(a, b, [](const auto& x, const auto& y) -> Plane<Scalar> { return x - y; });
}

template <typename Scalar>
Image<Scalar> operator*(Scalar s, const Image<Scalar>& a) {
  std::vector<Plane<Scalar>> out;
  for (const auto& p : a.planes()) out.push_back(s * p);
  return Image<Scalar>(std::move(out));
}

/// Largest absolute per-pixel difference between two images of the same shape.
template <typename Scalar>
Scalar max_abs_diff(const Image<Scalar>& a, const Image<Scalar>& b) {
  if (!a.same_shape(b)) throw DimMismatch("images differ in shape");
  Scalar m = 0;
  for (Eigen::Index c = 0; c < a.channels(); ++c)
    m = std::max(m, (a.plane(c) - b.plane(c)).abs().maxCoeff());
  return m;
}

/// Copy of `img` with every intensity clamped to [0,1].
template <typename Scalar>
Image<Scalar> clamped(const Image<Scalar>& img) {
  std::vector<Plane<Scalar>> out;
  for (const auto& p : img.planes()) out.push_back(p.max(Scalar(0)).min(Scalar(1)));
  return Image<Scalar>(std::move(out));
}

}  // namespace pyrblend
