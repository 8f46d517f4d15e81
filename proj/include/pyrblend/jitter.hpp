#pragma once

#include <cstdint>

#include "pyrblend/image.hpp"

namespace pyrblend {

/// Per-channel affine colour perturbation: gain in [1 - 0.2 s, 1 + 0.2 s],
/// offset in [-0.1 s, +0.1 s], both drawn from `entry_seed`. The result is
/// clamped to [0,1]. Strength 0 is the identity. Throws std::invalid_argument
/// for strength outside [0,1].
Image<float> color_jitter(const Image<float>& img, double strength, std::uint64_t entry_seed);

}  // namespace pyrblend
