#include "pyrblend/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace pyrblend {

namespace {

struct ErrorSink {
  char message[256] = {0};
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct ReadCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t n) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->size - cur->pos < n) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, cur->data + cur->pos, n);
  cur->pos += n;
}

void write_to_vector(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

void flush_noop(png_structp) {}

std::uint8_t to_code(float v) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

// All C++ objects live in the caller; nothing with a destructor is created
// between setjmp and the last libpng call.
bool decode_raw(std::span<const std::uint8_t> bytes, std::vector<std::uint8_t>& pixels, png_uint_32& width,
                png_uint_32& height, int& channels, int& bit_depth, ErrorSink& sink) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    std::snprintf(sink.message, sizeof(sink.message), "not a PNG file");
    return false;
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, on_png_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{bytes.data(), bytes.size(), 0};
  std::vector<png_bytep>* rows = nullptr;

  if (setjmp(png_jmpbuf(png))) {
    delete rows;
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &cursor, read_from_memory);
  png_read_info(png, info);

  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  if constexpr (std::endian::native == std::endian::little) {
    if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  bit_depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  pixels.resize(stride * height);
  rows = new std::vector<png_bytep>(height);
  for (png_uint_32 y = 0; y < height; ++y) (*rows)[y] = pixels.data() + y * stride;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  delete rows;
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_raw(const std::vector<std::uint8_t>& pixels, png_uint_32 width, png_uint_32 height, int channels,
                std::vector<std::uint8_t>& out, ErrorSink& sink) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, on_png_error, on_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, write_to_vector, flush_noop);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, width, height, 8, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
  for (png_uint_32 y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(pixels.data() + y * stride));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

Image<float> decode_png(std::span<const std::uint8_t> bytes) {
  std::vector<std::uint8_t> pixels;
  png_uint_32 width = 0, height = 0;
  int channels = 0, bit_depth = 0;
  ErrorSink sink;
  if (!decode_raw(bytes, pixels, width, height, channels, bit_depth, sink))
    throw DecodeError(std::string("PNG decode failed: ") + sink.message);
  if (width == 0 || height == 0) throw DecodeError("PNG has zero size");

  const int out_channels = channels >= 3 ? 3 : 1;
  Image<float> img(width, height, out_channels);
  const std::size_t bytes_per_sample = bit_depth == 16 ? 2 : 1;
  const float scale = bit_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
  const std::size_t stride = static_cast<std::size_t>(width) * channels * bytes_per_sample;
  for (png_uint_32 y = 0; y < height; ++y) {
    const std::uint8_t* row = pixels.data() + y * stride;
    for (png_uint_32 x = 0; x < width; ++x) {
      for (int c = 0; c < out_channels; ++c) {
        const std::size_t at = (static_cast<std::size_t>(x) * channels + c) * bytes_per_sample;
        float v;
        if (bytes_per_sample == 2) {
          std::uint16_t s;
          std::memcpy(&s, row + at, 2);
          v = static_cast<float>(s) * scale;
        } else {
          v = static_cast<float>(row[at]) * scale;
        }
        img(c, y, x) = v;
      }
    }
  }
  return img;
}

Image<float> read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_png(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const Image<float>& img) {
  if (img.empty()) throw EncodeError("cannot encode an empty image");
  const auto w = static_cast<std::size_t>(img.width()), h = static_cast<std::size_t>(img.height());
  const auto ch = static_cast<std::size_t>(img.channels());
  std::vector<std::uint8_t> pixels(w * h * ch);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < ch; ++c)
        pixels[(y * w + x) * ch + c] = to_code(img(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(y),
                                                   static_cast<Eigen::Index>(x)));
  std::vector<std::uint8_t> out;
  ErrorSink sink;
  if (!encode_raw(pixels, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), static_cast<int>(ch), out, sink))
    throw EncodeError(std::string("PNG encode failed: ") + sink.message);
  return out;
}

void write_png(const std::filesystem::path& path, const Image<float>& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EncodeError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw EncodeError("failed writing " + path.string());
}

Image<float> quantize8(const Image<float>& img) {
  std::vector<Plane<float>> planes;
  for (const auto& p : img.planes())
    planes.push_back(p.unaryExpr([](float v) { return static_cast<float>(to_code(v)) * (1.0f / 255.0f); }));
  return Image<float>(std::move(planes));
}

}  // namespace pyrblend
