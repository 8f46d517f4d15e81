#include "pyrblend/jitter.hpp"

#include <random>
#include <stdexcept>

namespace pyrblend {

namespace {

// Uniform in [-1, 1) from the top 53 bits.
double symmetric_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; }

}  // namespace

Image<float> color_jitter(const Image<float>& img, double strength, std::uint64_t entry_seed) {
  if (!(strength >= 0.0 && strength <= 1.0)) throw std::invalid_argument("jitter strength must lie in [0,1]");
  std::mt19937_64 rng(entry_seed);
  std::vector<Plane<float>> out;
  out.reserve(static_cast<std::size_t>(img.channels()));
  for (const auto& p : img.planes()) {
    const auto gain = static_cast<float>(1.0 + 0.2 * strength * symmetric_unit(rng));
    const auto offset = static_cast<float>(0.1 * strength * symmetric_unit(rng));
    out.push_back((gain * p + offset).max(0.0f).min(1.0f));
  }
  return Image<float>(std::move(out));
}

}  // namespace pyrblend
