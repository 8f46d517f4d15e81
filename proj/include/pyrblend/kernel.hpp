#pragma once

#include <array>
#include <cmath>

#include "pyrblend/errors.hpp"

namespace pyrblend {

/// Five-tap 1-D generating kernel. The 2-D weight is w(m,n) = taps[m+2] * taps[n+2].
///
/// A valid kernel sums to 1, is symmetric, and splits its mass evenly between
/// even and odd taps (taps[0]+taps[2]+taps[4] == taps[1]+taps[3] == 1/2), so every
/// node of a finer level contributes the same total weight to the coarser level.
template <typename Scalar = float>
class Kernel {
 public:
  static constexpr int kRadius = 2;
  static constexpr int kSize = 2 * kRadius + 1;

  /// [1 4 6 4 1] / 16, the 3-tap binomial (1/4, 1/2, 1/4) convolved with itself.
  static Kernel binomial() {
    return Kernel({Scalar(1) / 16, Scalar(4) / 16, Scalar(6) / 16, Scalar(4) / 16, Scalar(1) / 16});
  }

  /// Validates the taps; throws InvalidKernel when an invariant fails.
  static Kernel from_taps(const std::array<Scalar, kSize>& taps, double tolerance = 1e-6) {
    double sum = 0;
    for (auto t : taps) {
      if (!std::isfinite(static_cast<double>(t))) throw InvalidKernel("kernel taps must be finite");
      sum += static_cast<double>(t);
    }
    if (std::abs(sum - 1.0) > tolerance) throw InvalidKernel("kernel taps must sum to 1");
    if (std::abs(static_cast<double>(taps[0] - taps[4])) > tolerance ||
        std::abs(static_cast<double>(taps[1] - taps[3])) > tolerance)
      throw InvalidKernel("kernel taps must be symmetric");
    const double even = static_cast<double>(taps[0]) + taps[2] + taps[4];
    const double odd = static_cast<double>(taps[1]) + taps[3];
    if (std::abs(even - 0.5) > tolerance || std::abs(odd - 0.5) > tolerance)
      throw InvalidKernel("even and odd taps must each sum to 1/2");
    return Kernel(taps);
  }

  /// Tap for offset m in [-2, 2].
  Scalar tap(int m) const { return taps_[static_cast<std::size_t>(m + kRadius)]; }
  Scalar weight(int m, int n) const { return tap(m) * tap(n); }
  const std::array<Scalar, kSize>& taps() const { return taps_; }

 private:
  explicit Kernel(const std::array<Scalar, kSize>& taps) : taps_(taps) {}

  std::array<Scalar, kSize> taps_;
};

}  // namespace pyrblend
