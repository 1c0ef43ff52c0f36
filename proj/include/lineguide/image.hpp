#pragma once

#include <png.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "lineguide/error.hpp"

namespace lineguide {

/// Row-major 8-bit RGB frame.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

  bool empty() const { return width <= 0 || height <= 0; }
  std::uint8_t* at(int x, int y) { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
  const std::uint8_t* at(int x, int y) const {
    return &pixels[(static_cast<std::size_t>(y) * width + x) * 3];
  }
};

/// Single-channel 8-bit image: grayscale frames, edge maps.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct ForegroundMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1

  ForegroundMask() = default;
  ForegroundMask(int w, int h, bool fill = false)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height && at(x, y); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b != 0;
    return n;
  }
};

/// Integer Rec.601 luma, identical on every platform.
constexpr std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((77u * r + 150u * g + 29u * b + 128u) >> 8);
}

inline GrayImage to_gray(const Frame& f) {
  GrayImage g(f.width, f.height);
  for (std::size_t i = 0, n = g.pixels.size(); i < n; ++i) {
    g.pixels[i] = luma(f.pixels[3 * i], f.pixels[3 * i + 1], f.pixels[3 * i + 2]);
  }
  return g;
}

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::io, "read failed for '" + path.string() + "'");
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw Error(Errc::io, "write failed for '" + path.string() + "'");
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3
  std::vector<std::uint8_t> data;
};

// Decodes to 8-bit gray or RGB; alpha is composited onto black.
inline DecodedPng decode_png(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(Errc::format, "'" + path.string() + "' is not a PNG file");
  }
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::format, "'" + path.string() + "': " + msg);
  }
  DecodedPng out;
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = color ? 3 : 1;
  out.data.assign(PNG_IMAGE_SIZE(image), 0);
  if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::format, "'" + path.string() + "': " + msg);
  }
  return out;
}

inline void encode_png(const std::filesystem::path& path, int width, int height, int channels,
                       const std::uint8_t* data) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, data, 0, nullptr)) {
    throw Error(Errc::io, "PNG encode failed for '" + path.string() + "': " + image.message);
  }
  std::vector<std::uint8_t> buffer(size);
  if (!png_image_write_to_memory(&image, buffer.data(), &size, 0, data, 0, nullptr)) {
    throw Error(Errc::io, "PNG encode failed for '" + path.string() + "': " + image.message);
  }
  write_file_bytes(path, buffer.data(), size);
}

}  // namespace detail

inline Frame load_frame(const std::filesystem::path& path) {
  auto png = detail::decode_png(path);
  Frame f;
  f.width = png.width;
  f.height = png.height;
  if (png.channels == 3) {
    f.pixels = std::move(png.data);
  } else {
    f.pixels.resize(png.data.size() * 3);
    for (std::size_t i = 0; i < png.data.size(); ++i) {
      f.pixels[3 * i] = f.pixels[3 * i + 1] = f.pixels[3 * i + 2] = png.data[i];
    }
  }
  return f;
}

inline void save_frame(const std::filesystem::path& path, const Frame& f) {
  detail::encode_png(path, f.width, f.height, 3, f.pixels.data());
}

inline void save_gray(const std::filesystem::path& path, const GrayImage& g) {
  detail::encode_png(path, g.width, g.height, 1, g.pixels.data());
}

inline GrayImage load_gray(const std::filesystem::path& path) { return to_gray(load_frame(path)); }

/// Foreground iff luma > 127. An all-background mask loads fine; matching
/// rejects it later.
inline ForegroundMask load_mask(const std::filesystem::path& path) {
  const auto png = detail::decode_png(path);
  ForegroundMask m(png.width, png.height);
  const std::size_t n = static_cast<std::size_t>(png.width) * png.height;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t y =
        png.channels == 3 ? luma(png.data[3 * i], png.data[3 * i + 1], png.data[3 * i + 2]) : png.data[i];
    m.bits[i] = y > 127 ? 1 : 0;
  }
  return m;
}

inline void save_mask(const std::filesystem::path& path, const ForegroundMask& m) {
  GrayImage g(m.width, m.height);
  for (std::size_t i = 0; i < m.bits.size(); ++i) g.pixels[i] = m.bits[i] ? 255 : 0;
  save_gray(path, g);
}

}  // namespace lineguide
