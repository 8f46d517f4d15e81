#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pyrblend/image.hpp"

namespace pyrblend {

/// Decodes an 8- or 16-bit PNG into normalized [0,1] planes. Grayscale files
/// give one channel, everything else three; alpha is dropped.
/// Throws DecodeError.
Image<float> decode_png(std::span<const std::uint8_t> bytes);
Image<float> read_png(const std::filesystem::path& path);

/// Encodes as 8-bit gray or RGB after clamping to [0,1] and rounding to the
/// nearest code. Output bytes depend only on the pixel values.
std::vector<std::uint8_t> encode_png(const Image<float>& img);
void write_png(const std::filesystem::path& path, const Image<float>& img);

/// The image an 8-bit encode/decode round trip would give back.
Image<float> quantize8(const Image<float>& img);

}  // namespace pyrblend
