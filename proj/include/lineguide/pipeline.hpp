#pragma once

// End-to-end wiring shared by the CLI stages: input loading, the file
// formats that pass results between stages, and the one-shot run.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lineguide/detector.hpp"
#include "lineguide/error.hpp"
#include "lineguide/flow.hpp"
#include "lineguide/geometry.hpp"
#include "lineguide/image.hpp"
#include "lineguide/lines_io.hpp"
#include "lineguide/matching.hpp"
#include "lineguide/metrics.hpp"
#include "lineguide/raster.hpp"
#include "lineguide/trajectory.hpp"

namespace lineguide {

namespace fs = std::filesystem;

struct PipelineConfig {
  int T = 13;
  int k = 3;  // frame span the supplied flows were estimated over
  GuidanceMode mode = GuidanceMode::bspline;
  TimingRule timing = TimingRule::endpoint;
  RasterParams raster;
  int flow_radius = 5;
  double flow_scale = 1.0;
  DetectorParams detector;
  MatchConfig match;

  fs::path frame_a, frame_b;
  fs::path lines_a, lines_b;  // empty: run the fallback detector on the frame
  fs::path flow_a, flow_b;    // empty: zero flow
  fs::path mask_a, mask_b;
  fs::path out_dir;
  std::optional<fs::path> cost_dump;

  void validate() const {
    if (T < 1) throw Error(Errc::invalid_t, "T must be >= 1, got " + std::to_string(T));
    if (k < 1) throw Error(Errc::invalid_argument, "k must be >= 1");
    if (flow_radius < 1) throw Error(Errc::invalid_argument, "flow radius must be >= 1");
    if (!std::isfinite(flow_scale)) throw Error(Errc::invalid_argument, "flow scale must be finite");
    raster.validate();
    detector.validate();
    match.validate();
  }
};

struct PipelineInputs {
  LineSet lines_a, lines_b;
  ForegroundMask mask_a, mask_b;
  FlowField flow_a, flow_b;
};

namespace detail {

inline void require_same_size(int w0, int h0, int w1, int h1, const std::string& what) {
  if (w0 != w1 || h0 != h1) {
    throw Error(Errc::dimension_mismatch, what + ": " + std::to_string(w0) + "x" + std::to_string(h0) + " vs " +
                                              std::to_string(w1) + "x" + std::to_string(h1));
  }
}

inline LineSet lines_or_detect(const fs::path& lines, const fs::path& frame, const DetectorParams& params) {
  if (!lines.empty()) {
    LineSet set = load_lines(lines);
    if (!frame.empty() && fs::exists(frame)) {
      const Frame f = load_frame(frame);
      require_same_size(set.frame_width, set.frame_height, f.width, f.height, "lines '" + lines.string() + "' vs frame");
    }
    return set;
  }
  if (frame.empty()) throw Error(Errc::invalid_argument, "need either a line file or a frame to detect lines on");
  return detect_lines(load_frame(frame), params);
}

inline FlowField flow_or_zero(const fs::path& path, int w, int h) {
  if (path.empty()) return FlowField(w, h);
  FlowField f = load_flow(path);
  require_same_size(f.width, f.height, w, h, "flow '" + path.string() + "'");
  return f;
}

}  // namespace detail

inline PipelineInputs load_inputs(const PipelineConfig& cfg) {
  if (cfg.mask_a.empty() || cfg.mask_b.empty()) throw Error(Errc::invalid_argument, "both masks are required");
  PipelineInputs in;
  in.lines_a = detail::lines_or_detect(cfg.lines_a, cfg.frame_a, cfg.detector);
  in.lines_b = detail::lines_or_detect(cfg.lines_b, cfg.frame_b, cfg.detector);
  detail::require_same_size(in.lines_a.frame_width, in.lines_a.frame_height, in.lines_b.frame_width,
                            in.lines_b.frame_height, "frame A vs frame B");
  in.mask_a = load_mask(cfg.mask_a);
  in.mask_b = load_mask(cfg.mask_b);
  detail::require_same_size(in.mask_a.width, in.mask_a.height, in.lines_a.frame_width, in.lines_a.frame_height,
                            "mask '" + cfg.mask_a.string() + "'");
  detail::require_same_size(in.mask_b.width, in.mask_b.height, in.lines_b.frame_width, in.lines_b.frame_height,
                            "mask '" + cfg.mask_b.string() + "'");
  in.flow_a = detail::flow_or_zero(cfg.flow_a, in.mask_a.width, in.mask_a.height);
  in.flow_b = detail::flow_or_zero(cfg.flow_b, in.mask_b.width, in.mask_b.height);
  return in;
}

/// linear_all matches every line in pixel space; the other modes use the
/// layer-aware canonical matcher.
inline LayerMatch match_for_mode(const PipelineInputs& in, GuidanceMode mode, const MatchConfig& cfg) {
  if (mode == GuidanceMode::linear_all) return match_all_raw(in.lines_a, in.lines_b, cfg);
  return match_layer_aware(in.lines_a, in.mask_a, in.lines_b, in.mask_b, cfg);
}

inline std::pair<BoundingBox, BoundingBox> boxes_for_mode(const PipelineInputs& in, GuidanceMode mode) {
  if (mode == GuidanceMode::linear_all) {
    return {BoundingBox::from_corners(0, 0, in.lines_a.frame_width, in.lines_a.frame_height).clamped(),
            BoundingBox::from_corners(0, 0, in.lines_b.frame_width, in.lines_b.frame_height).clamped()};
  }
  return {tight_bbox(in.mask_a), tight_bbox(in.mask_b)};
}

inline GuidanceSequence guide_for(const PipelineInputs& in, const CorrespondenceSet& pairs, const PipelineConfig& cfg,
                                  FlowSummary* summary_out = nullptr) {
  if (pairs.empty()) {
    throw Error(Errc::empty_correspondence,
                "no line correspondences; check that the masks cover detected lines or lower fg_fraction");
  }
  const auto [box_a, box_b] = boxes_for_mode(in, cfg.mode);
  const FlowSummary flows = summarize_flow(in.flow_a, in.flow_b, pairs, in.lines_a, in.lines_b, in.mask_a, in.mask_b,
                                           cfg.flow_radius, cfg.flow_scale);
  if (summary_out) *summary_out = flows;
  return build_guidance(pairs, in.lines_a, in.lines_b, box_a, box_b, flows, cfg.T, cfg.mode, cfg.timing);
}

// ---------------------------------------------------------------------------
// Correspondence CSV: index_a,index_b,flip_b,cost

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_correspondences(const CorrespondenceSet& set) {
  std::string out = "index_a,index_b,flip_b,cost\n";
  for (const auto& c : set.pairs) {
    out += std::to_string(c.index_a) + "," + std::to_string(c.index_b) + "," + (c.flip_b ? "1" : "0") + "," +
           format_double(c.cost) + "\n";
  }
  return out;
}

inline void save_correspondences(const fs::path& path, const CorrespondenceSet& set) {
  const auto text = format_correspondences(set);
  detail::write_file_bytes(path, text.data(), text.size());
}

inline CorrespondenceSet load_correspondences(const fs::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::string line;
  if (!std::getline(in, line) || line != "index_a,index_b,flip_b,cost") {
    throw Error(Errc::format, "'" + path.string() + "' lacks the correspondence CSV header");
  }
  CorrespondenceSet set;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Correspondence c;
    int flip = 0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%d,%d,%d,%lf%c", &c.index_a, &c.index_b, &flip, &c.cost, &tail) != 4 ||
        (flip != 0 && flip != 1)) {
      throw Error(Errc::format, "'" + path.string() + "': bad row '" + line + "'");
    }
    c.flip_b = flip == 1;
    set.pairs.push_back(c);
  }
  return set;
}

/// Long-form dump: row,col,cost,assigned.
inline void save_cost_dump(const fs::path& path, const LayerMatch& m) {
  std::vector<char> assigned(m.cost.data.size(), 0);
  for (auto [i, j] : m.assignment) assigned[static_cast<std::size_t>(i) * m.cost.cols + j] = 1;
  std::string out = "row,col,cost,assigned\n";
  for (int i = 0; i < m.cost.rows; ++i) {
    for (int j = 0; j < m.cost.cols; ++j) {
      out += std::to_string(i) + "," + std::to_string(j) + "," + format_double(m.cost.at(i, j)) + "," +
             (assigned[static_cast<std::size_t>(i) * m.cost.cols + j] ? "1" : "0") + "\n";
    }
  }
  detail::write_file_bytes(path, out.data(), out.size());
}

// ---------------------------------------------------------------------------
// Guidance directory: lines_0001.json .. lines_T.json plus guide.json

inline constexpr const char* kGuideIndexName = "guide.json";

inline std::string guide_file_name(int t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "lines_%04d.json", t);
  return buf;
}

inline void save_guide(const fs::path& dir, const GuidanceSequence& seq, const FlowSummary& flows) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(Errc::io, "cannot create guide directory '" + dir.string() + "'");
  nlohmann::ordered_json idx;
  idx["T"] = seq.frames();
  idx["mode"] = std::string(to_string(seq.mode));
  idx["timing"] = std::string(to_string(seq.timing));
  idx["flow_scale"] = seq.flow_scale;
  idx["flow_a"] = {flows.fa.x, flows.fa.y};
  idx["flow_b"] = {flows.fb.x, flows.fb.y};
  idx["frames"] = nlohmann::ordered_json::array();
  idx["boxes"] = nlohmann::ordered_json::array();
  for (int t = 1; t <= seq.frames(); ++t) {
    const auto name = guide_file_name(t);
    save_lines(dir / name, seq.line_sets[t - 1]);
    idx["frames"].push_back(name);
    const auto& b = seq.boxes.boxes[t - 1];
    idx["boxes"].push_back({b.cx, b.cy, b.w, b.h});
  }
  const auto text = idx.dump(2) + "\n";
  detail::write_file_bytes(dir / kGuideIndexName, text.data(), text.size());
}

/// Reads a guide directory (or its guide.json) back into a sequence.
inline GuidanceSequence load_guide(const fs::path& where) {
  const fs::path index = fs::is_directory(where) ? where / kGuideIndexName : where;
  const fs::path dir = index.parent_path();
  const auto bytes = detail::read_file_bytes(index);
  GuidanceSequence seq;
  try {
    const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    seq.mode = parse_mode(j.at("mode").get<std::string>());
    seq.timing = parse_timing(j.at("timing").get<std::string>());
    seq.flow_scale = j.at("flow_scale").get<double>();
    const int T = j.at("T").get<int>();
    const auto frames = j.at("frames").get<std::vector<std::string>>();
    if (static_cast<int>(frames.size()) != T) throw Error(Errc::format, "'" + index.string() + "': frames != T");
    for (const auto& f : frames) seq.line_sets.push_back(load_lines(dir / f, false));
    for (const auto& b : j.at("boxes")) {
      seq.boxes.boxes.push_back({b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
                                 b.at(3).get<double>()});
    }
    for (int t = 1; t <= T; ++t) seq.boxes.u.push_back(timing_u(t, T, seq.timing));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::format, "'" + index.string() + "': " + e.what());
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Similarity report output

inline nlohmann::ordered_json to_json(const SimilarityReport& r) {
  nlohmann::ordered_json j;
  j["overall"] = r.overall;
  j["per_frame"] = r.per_frame;
  j["excluded_frames"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.frame_excluded.size(); ++i) {
    if (r.frame_excluded[i]) j["excluded_frames"].push_back(i);
  }
  j["valid_pixel_fraction"] = r.valid_pixel_fraction;
  j["raw_sum"] = r.raw_sum;
  j["valid_pixels"] = r.valid_pixels;
  return j;
}

inline std::string format_report_table(const SimilarityReport& r) {
  std::ostringstream out;
  char buf[96];
  out << "frame  cosine     excluded\n";
  for (std::size_t i = 0; i < r.per_frame.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%5zu  %+.6f  %s\n", i + 1, r.per_frame[i], r.frame_excluded[i] ? "yes" : "no");
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "overall %+.6f  valid pixels %.4f  raw sum %.6g\n", r.overall,
                r.valid_pixel_fraction, r.raw_sum);
  out << buf;
  return out.str();
}

// ---------------------------------------------------------------------------

struct RunResult {
  PipelineInputs inputs;
  LayerMatch match;
  FlowSummary flows;
  GuidanceSequence guidance;
  ConditioningManifest manifest;
  std::size_t crossings = 0;
};

/// ingest -> match -> orient -> flow summary -> guidance -> edge maps + manifest.
inline RunResult run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.frame_a.empty() || cfg.frame_b.empty()) {
    throw Error(Errc::invalid_argument, "boundary frames are required for the manifest");
  }
  if (cfg.out_dir.empty()) throw Error(Errc::invalid_argument, "output directory is required");
  RunResult r;
  r.inputs = load_inputs(cfg);
  r.match = match_for_mode(r.inputs, cfg.mode, cfg.match);
  if (cfg.cost_dump) save_cost_dump(*cfg.cost_dump, r.match);
  r.guidance = guide_for(r.inputs, r.match.correspondences, cfg, &r.flows);
  r.crossings = r.guidance.frames() >= 2 ? crossing_count(r.guidance) : 0;
  r.manifest = emit_sequence(r.guidance, cfg.raster, cfg.out_dir, cfg.frame_a, cfg.frame_b);
  return r;
}

}  // namespace lineguide
