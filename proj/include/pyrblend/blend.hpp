#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pyrblend/errors.hpp"
#include "pyrblend/image.hpp"
#include "pyrblend/kernel.hpp"
#include "pyrblend/pyramid.hpp"

namespace pyrblend {

/// Vertical splits the columns (left half / right half); horizontal splits the rows.
enum class Orientation { vertical, horizontal };

enum class BlendMethod { direct, mix, glpb };

enum class MaskKind { half_vertical, half_horizontal, custom };

inline std::string_view to_string(Orientation o) { return o == Orientation::vertical ? "vertical" : "horizontal"; }

inline std::string_view to_string(BlendMethod m) {
  switch (m) {
    case BlendMethod::direct: return "direct";
    case BlendMethod::mix: return "mix";
    case BlendMethod::glpb: return "glpb";
  }
  return "?";
}

inline std::string_view to_string(MaskKind k) {
  switch (k) {
    case MaskKind::half_vertical: return "half_vertical";
    case MaskKind::half_horizontal: return "half_horizontal";
    case MaskKind::custom: return "custom";
  }
  return "?";
}

inline std::optional<BlendMethod> parse_blend_method(std::string_view s) {
  for (auto m : {BlendMethod::direct, BlendMethod::mix, BlendMethod::glpb})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

inline std::optional<MaskKind> parse_mask_kind(std::string_view s) {
  for (auto k : {MaskKind::half_vertical, MaskKind::half_horizontal, MaskKind::custom})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Single-channel weight in [0,1]: 0 selects image A, 1 selects image B.
template <typename Scalar = float>
class BlendMask {
 public:
  explicit BlendMask(Image<Scalar> mask) : mask_(std::move(mask)) {
    if (mask_.channels() != 1) throw InvalidBlendSpec("blend mask must be single-channel");
    const auto& p = mask_.plane(0);
    if (!p.allFinite() || p.minCoeff() < Scalar(0) || p.maxCoeff() > Scalar(1))
      throw InvalidBlendSpec("blend mask values must lie in [0,1]");
  }

  const Image<Scalar>& image() const { return mask_; }
  const Plane<Scalar>& plane() const { return mask_.plane(0); }
  Eigen::Index width() const { return mask_.width(); }
  Eigen::Index height() const { return mask_.height(); }

  /// 1 - R, the complementary mask.
  BlendMask inverted() const {
    return BlendMask(Image<Scalar>(std::vector<Plane<Scalar>>{Scalar(1) - mask_.plane(0)}));
  }

  static BlendMask constant(Eigen::Index width, Eigen::Index height, Scalar value) {
    return BlendMask(Image<Scalar>(width, height, 1, value));
  }

 private:
  Image<Scalar> mask_;
};

struct BlendSpec {
  BlendMethod method = BlendMethod::glpb;
  MaskKind mask_kind = MaskKind::half_vertical;
  Eigen::Index transition_width = 0;
  std::optional<int> n_levels;  ///< unset: default_levels() of the inputs

  /// Throws InvalidBlendSpec / TooManyLevels when the spec cannot apply to a w x h image.
  void validate(Eigen::Index width, Eigen::Index height) const {
    const Eigen::Index span = mask_kind == MaskKind::half_horizontal ? height : width;
    if (transition_width < 0 || transition_width > span)
      throw InvalidBlendSpec("transition width must lie in [0, " + std::to_string(span) + "]");
    if (n_levels) check_levels(width, height, *n_levels);
  }
};

/// Binary split mask: for vertical, columns [0, floor(w/2)) are 0 and the rest 1.
template <typename Scalar = float>
BlendMask<Scalar> make_half_mask(Eigen::Index width, Eigen::Index height, Orientation orientation) {
  Image<Scalar> m(width, height, 1);
  if (orientation == Orientation::vertical)
    m.plane(0).rightCols(width - width / 2).setConstant(Scalar(1));
  else
    m.plane(0).bottomRows(height - height / 2).setConstant(Scalar(1));
  return BlendMask<Scalar>(std::move(m));
}

/// Linear ramp of `transition_width` pixels centred on the half-mask seam.
/// Width 0 reproduces make_half_mask exactly.
template <typename Scalar = float>
BlendMask<Scalar> make_ramp_mask(Eigen::Index width, Eigen::Index height, Orientation orientation,
                                 Eigen::Index transition_width) {
  const Eigen::Index span = orientation == Orientation::vertical ? width : height;
  if (transition_width < 0 || transition_width > span)
    throw InvalidBlendSpec("transition width must lie in [0, " + std::to_string(span) + "]");
  if (transition_width == 0) return make_half_mask<Scalar>(width, height, orientation);

  const double seam = static_cast<double>(span / 2);
  const double tw = static_cast<double>(transition_width);
  Eigen::Array<Scalar, Eigen::Dynamic, 1> ramp(span);
  for (Eigen::Index i = 0; i < span; ++i) {
    const double r = (static_cast<double>(i) + 0.5 - seam) / tw + 0.5;
    ramp(i) = static_cast<Scalar>(std::clamp(r, 0.0, 1.0));
  }
  Image<Scalar> m(width, height, 1);
  if (orientation == Orientation::vertical)
    m.plane(0).rowwise() = ramp.transpose();
  else
    m.plane(0).colwise() = ramp;
  return BlendMask<Scalar>(std::move(m));
}

namespace detail {

// out = (1 - R) * a + R * b, channel by channel.
template <typename Scalar>
Image<Scalar> interpolate(const Image<Scalar>& a, const Image<Scalar>& b, const Plane<Scalar>& r) {
  return zip_planes(a, b, [&r](const auto& pa, const auto& pb) -> Plane<Scalar> {
    return (Scalar(1) - r) * pa + r * pb;
  });
}

template <typename Scalar>
void check_blend_inputs(const Image<Scalar>& a, const Image<Scalar>& b, Eigen::Index mw, Eigen::Index mh) {
  if (!a.same_shape(b))
    throw DimMismatch("cannot blend " + std::to_string(a.width()) + "x" + std::to_string(a.height()) + "x" +
                      std::to_string(a.channels()) + " with " + std::to_string(b.width()) + "x" +
                      std::to_string(b.height()) + "x" + std::to_string(b.channels()));
  if (mw != a.width() || mh != a.height()) throw DimMismatch("mask dimensions differ from image dimensions");
}

}  // namespace detail

/// Per-pixel select/interpolate; with a binary half mask this is the plain
/// half-and-half concatenation.
template <typename Scalar>
Image<Scalar> direct_blend(const Image<Scalar>& a, const Image<Scalar>& b, const BlendMask<Scalar>& mask) {
  detail::check_blend_inputs(a, b, mask.width(), mask.height());
  return detail::interpolate(a, b, mask.plane());
}

/// Linear colour transition of `transition_width` pixels across the middle.
template <typename Scalar>
Image<Scalar> mix_blend(const Image<Scalar>& a, const Image<Scalar>& b, Orientation orientation,
                        Eigen::Index transition_width) {
  if (!a.same_shape(b)) detail::check_blend_inputs(a, b, a.width(), a.height());
  return direct_blend(a, b, make_ramp_mask<Scalar>(a.width(), a.height(), orientation, transition_width));
}

/// Multi-resolution blend: Laplacian pyramids of a and b are interpolated
/// level by level under the Gaussian pyramid of the mask (the residual top
/// level included), then collapsed. The result is not clamped.
template <typename Scalar>
Image<Scalar> pyramid_blend(const Image<Scalar>& a, const Image<Scalar>& b, const BlendMask<Scalar>& mask,
                            const Kernel<Scalar>& kernel, int n_levels) {
  detail::check_blend_inputs(a, b, mask.width(), mask.height());
  check_levels(a.width(), a.height(), n_levels);

  const auto al = build_laplacian(a, kernel, n_levels);
  const auto bl = build_laplacian(b, kernel, n_levels);
  const auto rg = build_gaussian(mask.image(), kernel, n_levels);

  LaplacianPyramid<Scalar> fl;
  fl.level_dims = al.level_dims;
  fl.band_levels.reserve(static_cast<std::size_t>(n_levels));
  for (int l = 0; l < n_levels; ++l)
    fl.band_levels.push_back(detail::interpolate(al.band_levels[l], bl.band_levels[l], rg.levels[l].plane(0)));
  fl.top = detail::interpolate(al.top, bl.top, rg.levels[n_levels].plane(0));
  return collapse(fl, kernel);
}

/// Largest absolute difference between neighbouring pixels along the blend
/// axis (across columns for vertical, across rows for horizontal), over all
/// channels. Zero for images one pixel wide along that axis.
template <typename Scalar>
Scalar seam_energy(const Image<Scalar>& img, Orientation orientation) {
  Scalar m = 0;
  for (const auto& p : img.planes()) {
    if (orientation == Orientation::vertical) {
      if (p.cols() < 2) continue;
      m = std::max(m, (p.rightCols(p.cols() - 1) - p.leftCols(p.cols() - 1)).abs().maxCoeff());
    } else {
      if (p.rows() < 2) continue;
      m = std::max(m, (p.bottomRows(p.rows() - 1) - p.topRows(p.rows() - 1)).abs().maxCoeff());
    }
  }
  return m;
}

/// Mean absolute difference between the two pixel lines that meet at the
/// half-mask seam (columns floor(w/2)-1 and floor(w/2) for vertical).
/// Less sensitive to texture than seam_energy.
template <typename Scalar>
Scalar seam_boundary_energy(const Image<Scalar>& img, Orientation orientation) {
  const Eigen::Index span = orientation == Orientation::vertical ? img.width() : img.height();
  const Eigen::Index s = span / 2;
  if (s < 1) return Scalar(0);
  Scalar sum = 0;
  for (const auto& p : img.planes()) {
    if (orientation == Orientation::vertical)
      sum += (p.col(s) - p.col(s - 1)).abs().mean();
    else
      sum += (p.row(s) - p.row(s - 1)).abs().mean();
  }
  return sum / static_cast<Scalar>(img.channels());
}

inline Orientation orientation_of(MaskKind kind) {
  return kind == MaskKind::half_horizontal ? Orientation::horizontal : Orientation::vertical;
}

/// Dispatches on spec.method. `custom_mask` is required for MaskKind::custom
/// and ignored otherwise; mix always uses the orientation of spec.mask_kind.
template <typename Scalar>
Image<Scalar> blend(const Image<Scalar>& a, const Image<Scalar>& b, const BlendSpec& spec,
                    const Kernel<Scalar>& kernel, const BlendMask<Scalar>* custom_mask = nullptr) {
  detail::check_blend_inputs(a, b, a.width(), a.height());
  spec.validate(a.width(), a.height());
  const Orientation orientation = orientation_of(spec.mask_kind);
  if (spec.method == BlendMethod::mix) {
    if (spec.mask_kind == MaskKind::custom) throw InvalidBlendSpec("mix blending needs a half mask orientation");
    return mix_blend(a, b, orientation, spec.transition_width);
  }
  std::optional<BlendMask<Scalar>> owned;
  const BlendMask<Scalar>* mask = custom_mask;
  if (spec.mask_kind != MaskKind::custom) {
    owned.emplace(make_half_mask<Scalar>(a.width(), a.height(), orientation));
    mask = &*owned;
  } else if (mask == nullptr) {
    throw InvalidBlendSpec("custom mask kind requires a mask image");
  }
  if (spec.method == BlendMethod::direct) return direct_blend(a, b, *mask);
  return pyramid_blend(a, b, *mask, kernel, spec.n_levels.value_or(default_levels(a.width(), a.height())));
}

}  // namespace pyrblend
