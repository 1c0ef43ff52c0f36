#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "lineguide/error.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/image.hpp"

namespace lineguide {

/// Dense per-pixel displacement (dx, dy) in pixels, row-major, interleaved.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> vectors;

  FlowField() = default;
  FlowField(int w, int h, float dx = 0.0f, float dy = 0.0f)
      : width(w), height(h), vectors(static_cast<std::size_t>(w) * h * 2) {
    for (std::size_t i = 0; i < vectors.size(); i += 2) {
      vectors[i] = dx;
      vectors[i + 1] = dy;
    }
  }

  std::size_t index(int x, int y) const { return (static_cast<std::size_t>(y) * width + x) * 2; }
  float dx(int x, int y) const { return vectors[index(x, y)]; }
  float dy(int x, int y) const { return vectors[index(x, y) + 1]; }
  void set(int x, int y, float fx, float fy) {
    vectors[index(x, y)] = fx;
    vectors[index(x, y) + 1] = fy;
  }
  Vec2 at(int x, int y) const { return {dx(x, y), dy(x, y)}; }
};

// Middlebury .flo: "PIEH", int32 width, int32 height, then float32 (dx, dy)
// pairs row-major, everything little-endian.
namespace flo {

inline constexpr char kMagic[4] = {'P', 'I', 'E', 'H'};

inline std::uint32_t read_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void write_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

inline FlowField decode(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  if (bytes.size() < 12) throw Error(Errc::format, "'" + name + "' is too short for a .flo header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(Errc::format, "'" + name + "' has bad .flo magic");
  }
  const auto w = static_cast<std::int32_t>(read_u32_le(bytes.data() + 4));
  const auto h = static_cast<std::int32_t>(read_u32_le(bytes.data() + 8));
  if (w <= 0 || h <= 0 || w > (1 << 16) || h > (1 << 16)) {
    throw Error(Errc::format, "'" + name + "' has invalid .flo dimensions");
  }
  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 2;
  if (bytes.size() - 12 != count * 4) {
    throw Error(Errc::size_mismatch, "'" + name + "' payload is " + std::to_string(bytes.size() - 12) +
                                         " bytes, header implies " + std::to_string(count * 4));
  }
  FlowField f;
  f.width = w;
  f.height = h;
  f.vectors.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float v = std::bit_cast<float>(read_u32_le(bytes.data() + 12 + 4 * i));
    if (!std::isfinite(v)) throw Error(Errc::format, "'" + name + "' contains non-finite flow");
    f.vectors[i] = v;
  }
  return f;
}

inline std::vector<std::uint8_t> encode(const FlowField& f) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + f.vectors.size() * 4);
  out.insert(out.end(), kMagic, kMagic + 4);
  write_u32_le(out, static_cast<std::uint32_t>(f.width));
  write_u32_le(out, static_cast<std::uint32_t>(f.height));
  for (float v : f.vectors) write_u32_le(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

}  // namespace flo

inline FlowField load_flow(const std::filesystem::path& path) {
  return flo::decode(detail::read_file_bytes(path), path.string());
}

inline void write_flow(const std::filesystem::path& path, const FlowField& f) {
  if (f.vectors.size() != static_cast<std::size_t>(f.width) * f.height * 2) {
    throw Error(Errc::size_mismatch, "flow buffer does not match its dimensions");
  }
  const auto bytes = flo::encode(f);
  detail::write_file_bytes(path, bytes.data(), bytes.size());
}

}  // namespace lineguide
