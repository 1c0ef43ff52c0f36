#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lineguide/error.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/image.hpp"

namespace lineguide {

// Line-JSON: {"width": int, "height": int, "lines": [[x1,y1,x2,y2], ...]}

/// Endpoints are clamped into the frame unless `clamp` is false.
inline LineSet parse_lines(const std::string& text, const std::string& name = "<memory>", bool clamp = true) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::format, "'" + name + "': " + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::format, "'" + name + "': top level must be an object");
  if (!doc.contains("width") || !doc.contains("height")) {
    throw Error(Errc::dimension_missing, "'" + name + "' lacks width/height");
  }
  if (!doc["width"].is_number_integer() || !doc["height"].is_number_integer()) {
    throw Error(Errc::format, "'" + name + "': width/height must be integers");
  }
  LineSet set;
  set.frame_width = doc["width"].get<int>();
  set.frame_height = doc["height"].get<int>();
  if (set.frame_width <= 0 || set.frame_height <= 0) {
    throw Error(Errc::format, "'" + name + "': width/height must be positive");
  }
  const auto it = doc.find("lines");
  if (it == doc.end() || !it->is_array()) throw Error(Errc::format, "'" + name + "': missing lines array");
  set.lines.reserve(it->size());
  for (const auto& entry : *it) {
    if (!entry.is_array() || entry.size() != 4) {
      throw Error(Errc::format, "'" + name + "': each line must be [x1,y1,x2,y2]");
    }
    double c[4];
    for (int k = 0; k < 4; ++k) {
      if (!entry[k].is_number()) throw Error(Errc::format, "'" + name + "': non-numeric coordinate");
      c[k] = entry[k].get<double>();
    }
    const LineSegment l{c[0], c[1], c[2], c[3]};
    if (!l.finite()) throw Error(Errc::format, "'" + name + "': non-finite coordinate");
    set.lines.push_back(clamp ? clamp_to_frame(l, set.frame_width, set.frame_height) : l);
  }
  return set;
}

inline LineSet load_lines(const std::filesystem::path& path, bool clamp = true) {
  const auto bytes = detail::read_file_bytes(path);
  return parse_lines(std::string(bytes.begin(), bytes.end()), path.string(), clamp);
}

inline std::string format_lines(const LineSet& set) {
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& l : set.lines) lines.push_back({l.x1, l.y1, l.x2, l.y2});
  nlohmann::json doc;
  doc["width"] = set.frame_width;
  doc["height"] = set.frame_height;
  doc["lines"] = std::move(lines);
  return doc.dump() + "\n";
}

inline void save_lines(const std::filesystem::path& path, const LineSet& set) {
  const auto text = format_lines(set);
  detail::write_file_bytes(path, text.data(), text.size());
}

}  // namespace lineguide
