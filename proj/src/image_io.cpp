#include "cdnet/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <stdexcept>

#include "cdnet/errors.hpp"

namespace cdnet {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image::Image(std::int64_t w, std::int64_t h, int c, std::uint8_t fill)
    : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w * h * c), fill) {
  if (w < 1 || h < 1 || (c != 1 && c != 3)) throw std::invalid_argument("Image: invalid dimensions");
}

Image Image::crop(std::int64_t x0, std::int64_t y0, std::int64_t w, std::int64_t h) const {
  if (x0 < 0 || y0 < 0 || x0 + w > width || y0 + h > height) {
    throw std::invalid_argument("Image::crop: window outside image bounds");
  }
  Image out(w, h, channels);
  for (std::int64_t y = 0; y < h; ++y) {
    const auto* src = pixels.data() + ((y0 + y) * width + x0) * channels;
    std::copy(src, src + w * channels, out.pixels.data() + y * w * channels);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw std::runtime_error("write_png: cannot open " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("write_png: libpng error writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::int64_t y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(image.pixels.data() + y * image.width * image.channels));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw std::runtime_error("read_png: cannot open " + path.string());
  png_byte header[8] = {};
  if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
    throw FormatError("read_png: " + path.string() + " is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("read_png: libpng initialisation failed");
  }
  Image image;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("read_png: corrupt PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("read_png: unsupported channel count in " + path.string());
  }
  image = Image(png_get_image_width(png, info), png_get_image_height(png, info), channels);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (std::int64_t y = 0; y < image.height; ++y) rows[static_cast<std::size_t>(y)] = image.pixels.data() + y * image.width * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

Image mask_to_image(const BinaryMap& mask) {
  Image out(mask.width, mask.height, 1);
  for (std::size_t i = 0; i < mask.size(); ++i) out.pixels[i] = mask.values[i] ? 255 : 0;
  return out;
}

BinaryMap image_to_mask(const Image& image) {
  if (image.channels != 1) throw FormatError("image_to_mask: masks must be single-channel");
  BinaryMap out(image.width, image.height, 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto v = image.pixels[i];
    if (v != 0 && v != 255) throw FormatError("image_to_mask: mask value " + std::to_string(v) + " is not 0 or 255");
    out.values[i] = v == 255 ? 1 : 0;
  }
  return out;
}

Image probability_to_image(const ProbMap& prob) {
  Image out(prob.width, prob.height, 1);
  for (std::size_t i = 0; i < prob.size(); ++i) {
    const double v = std::clamp(static_cast<double>(prob.values[i]), 0.0, 1.0);
    out.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
  }
  return out;
}

namespace {

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::vector<char>& in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace

void write_prob_raw(const std::filesystem::path& path, const ProbMap& prob) {
  std::vector<char> bytes = {'C', 'D', 'P', 'M'};
  put_u32(bytes, static_cast<std::uint32_t>(prob.width));
  put_u32(bytes, static_cast<std::uint32_t>(prob.height));
  for (float v : prob.values) put_u32(bytes, std::bit_cast<std::uint32_t>(v));
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("write_prob_raw: cannot open " + path.string());
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ProbMap read_prob_raw(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_prob_raw: cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "CDPM", 4) != 0) {
    throw FormatError("read_prob_raw: " + path.string() + " is not a probability dump");
  }
  const auto w = get_u32(bytes, 4), h = get_u32(bytes, 8);
  if (w == 0 || h == 0 || bytes.size() != 12 + 4ULL * w * h) {
    throw FormatError("read_prob_raw: " + path.string() + " has an inconsistent length");
  }
  ProbMap out(w, h, 0.0f);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = std::bit_cast<float>(get_u32(bytes, 12 + 4 * i));
  return out;
}

}  // namespace cdnet
