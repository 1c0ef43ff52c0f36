// lineguide: structural guidance for transitions between two clips.
//
//   lineguide run     --frame-a A.png --frame-b B.png --mask-a ... --out DIR
//   lineguide detect  --frame A.png --out lines_a.json
//   lineguide match   --lines-a ... --lines-b ... --mask-a ... --mask-b ... --out pairs.csv
//   lineguide guide   ... --pairs pairs.csv --out guide/
//   lineguide raster  --guide guide/ --frame-a A.png --frame-b B.png --out DIR
//   lineguide metrics --ref r1.flo r2.flo --gen g1.flo g2.flo
//
// Exit codes: 0 success, 2 input error, 3 no line correspondences.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lineguide/lineguide.hpp"

namespace {

using namespace lineguide;
namespace fs = std::filesystem;

constexpr int kExitInput = 2;
constexpr int kExitNoCorrespondence = 3;

struct Options {
  PipelineConfig cfg;
  std::string mode = "bspline";
  std::string timing = "endpoint";
  bool no_antialias = false;
  double cost_cap = -1.0;
  std::string dump_costs;
  fs::path frame;
  fs::path out;
  fs::path pairs;
  fs::path guide;
  fs::path report;
  std::vector<fs::path> ref_flows;
  std::vector<fs::path> gen_flows;

  void finalize() {
    cfg.mode = parse_mode(mode);
    cfg.timing = parse_timing(timing);
    cfg.raster.antialias = !no_antialias;
    if (cost_cap >= 0.0) cfg.match.cost_cap = cost_cap;
    if (!dump_costs.empty()) cfg.cost_dump = dump_costs;
    cfg.out_dir = out;
  }
};

void add_input_options(CLI::App* app, Options& o) {
  app->add_option("--frame-a", o.cfg.frame_a, "Last frame of clip A (PNG)");
  app->add_option("--frame-b", o.cfg.frame_b, "First frame of clip B (PNG)");
  app->add_option("--lines-a", o.cfg.lines_a, "Line-JSON for frame A (default: detect)");
  app->add_option("--lines-b", o.cfg.lines_b, "Line-JSON for frame B (default: detect)");
  app->add_option("--mask-a", o.cfg.mask_a, "Foreground mask for frame A (PNG)")->required();
  app->add_option("--mask-b", o.cfg.mask_b, "Foreground mask for frame B (PNG)")->required();
}

void add_flow_options(CLI::App* app, Options& o) {
  app->add_option("--flow-a", o.cfg.flow_a, "Boundary flow of clip A (.flo, default zero)");
  app->add_option("--flow-b", o.cfg.flow_b, "Boundary flow of clip B (.flo, default zero)");
  app->add_option("-k,--flow-span", o.cfg.k, "Frame span the flows were estimated over")->capture_default_str();
  app->add_option("--flow-radius", o.cfg.flow_radius, "Band radius around matched lines, px")
      ->capture_default_str();
  app->add_option("--flow-scale", o.cfg.flow_scale, "Multiplier on the aggregated flows")->capture_default_str();
}

void add_detector_options(CLI::App* app, Options& o) {
  auto& d = o.cfg.detector;
  app->add_option("--gradient-threshold", d.gradient_threshold)->capture_default_str();
  app->add_option("--min-length", d.min_length)->capture_default_str();
  app->add_option("--max-lines", d.max_lines)->capture_default_str();
  app->add_option("--merge-angle-tol", d.merge_angle_tol, "degrees")->capture_default_str();
  app->add_option("--merge-gap-tol", d.merge_gap_tol, "pixels")->capture_default_str();
}

void add_match_options(CLI::App* app, Options& o) {
  auto& m = o.cfg.match;
  app->add_option("--sample-count", m.sample_count, "Mask samples per line")->capture_default_str();
  app->add_option("--fg-fraction", m.fg_fraction, "Keep lines whose in-mask fraction exceeds this")
      ->capture_default_str();
  app->add_option("--cost-cap", o.cost_cap, "Drop matched pairs costing more than this");
  app->add_option("--w-center", m.w_center)->capture_default_str();
  app->add_option("--w-angle", m.w_angle)->capture_default_str();
  app->add_option("--w-length", m.w_length)->capture_default_str();
  app->add_option("--dump-costs", o.dump_costs, "Write the cost matrix and assignment as CSV");
}

void add_mode_options(CLI::App* app, Options& o) {
  app->add_option("--mode", o.mode, "linear_all | linear_fg | bspline")->capture_default_str();
}

void add_trajectory_options(CLI::App* app, Options& o) {
  app->add_option("-T,--num-frames", o.cfg.T, "In-between frames")->capture_default_str();
  app->add_option("--timing", o.timing, "endpoint (t/T) | interior (t/(T+1))")->capture_default_str();
}

void add_raster_options(CLI::App* app, Options& o) {
  app->add_option("--stroke-width", o.cfg.raster.stroke_width)->capture_default_str();
  app->add_flag("--no-antialias", o.no_antialias);
  app->add_option("--width", o.cfg.raster.out_width, "Edge map width (default: frame width)");
  app->add_option("--height", o.cfg.raster.out_height, "Edge map height (default: frame height)");
}

std::vector<FlowField> load_flows(const std::vector<fs::path>& paths) {
  std::vector<FlowField> out;
  for (const auto& p : paths) out.push_back(load_flow(p));
  return out;
}

void print_report(const SimilarityReport& rep, const fs::path& json_path) {
  std::cout << format_report_table(rep);
  if (!json_path.empty()) {
    const auto text = to_json(rep).dump(2) + "\n";
    detail::write_file_bytes(json_path, text.data(), text.size());
  }
}

int cmd_run(Options& o) {
  o.finalize();
  const RunResult r = run_pipeline(o.cfg);
  std::cout << "matched " << r.match.correspondences.size() << " line pairs; mode " << to_string(o.cfg.mode)
            << "; crossings " << r.crossings << "\n";
  std::cout << "wrote " << r.manifest.T << " edge maps and " << (o.cfg.out_dir / kManifestName).string() << "\n";
  if (!o.ref_flows.empty() || !o.gen_flows.empty()) {
    print_report(flow_similarity(load_flows(o.ref_flows), load_flows(o.gen_flows)), o.report);
  }
  return 0;
}

int cmd_detect(Options& o) {
  o.cfg.detector.validate();
  const LineSet lines = detect_lines(load_frame(o.frame), o.cfg.detector);
  save_lines(o.out, lines);
  std::cout << "detected " << lines.size() << " lines\n";
  return 0;
}

int cmd_match(Options& o) {
  o.finalize();
  o.cfg.match.validate();
  const PipelineInputs in = load_inputs(o.cfg);
  const LayerMatch m = match_for_mode(in, o.cfg.mode, o.cfg.match);
  if (o.cfg.cost_dump) save_cost_dump(*o.cfg.cost_dump, m);
  save_correspondences(o.out, m.correspondences);
  std::cout << "matched " << m.correspondences.size() << " line pairs\n";
  if (m.correspondences.empty()) throw Error(Errc::empty_correspondence, "no line correspondences");
  return 0;
}

int cmd_guide(Options& o) {
  o.finalize();
  o.cfg.validate();
  const PipelineInputs in = load_inputs(o.cfg);
  const CorrespondenceSet pairs = load_correspondences(o.pairs);
  FlowSummary flows;
  const GuidanceSequence seq = guide_for(in, pairs, o.cfg, &flows);
  save_guide(o.out, seq, flows);
  std::cout << "wrote " << seq.frames() << " guidance frames; crossings "
            << (seq.frames() >= 2 ? crossing_count(seq) : 0) << "\n";
  return 0;
}

int cmd_raster(Options& o) {
  o.finalize();
  o.cfg.raster.validate();
  const GuidanceSequence seq = load_guide(o.guide);
  const auto m = emit_sequence(seq, o.cfg.raster, o.out, o.cfg.frame_a, o.cfg.frame_b);
  std::cout << "wrote " << m.T << " edge maps and " << (o.out / kManifestName).string() << "\n";
  return 0;
}

int cmd_metrics(Options& o) {
  print_report(flow_similarity(load_flows(o.ref_flows), load_flows(o.gen_flows)), o.report);
  if (!o.guide.empty()) {
    const GuidanceSequence seq = load_guide(o.guide);
    std::cout << "crossings " << (seq.frames() >= 2 ? crossing_count(seq) : 0) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural line guidance for transitions between two clips"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags win");
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Full pipeline: match, guide, rasterize, write manifest");
  add_input_options(run, o);
  add_flow_options(run, o);
  add_detector_options(run, o);
  add_match_options(run, o);
  add_mode_options(run, o);
  add_trajectory_options(run, o);
  add_raster_options(run, o);
  run->add_option("--out", o.out, "Output directory")->required();
  run->add_option("--ref-flows", o.ref_flows, "Reference transition flows (.flo) for the similarity report");
  run->add_option("--gen-flows", o.gen_flows, "Generated transition flows (.flo)");
  run->add_option("--report", o.report, "Write the similarity report as JSON");

  auto* detect = app.add_subcommand("detect", "Fallback line detection on one frame");
  detect->add_option("--frame", o.frame, "Input frame (PNG)")->required();
  detect->add_option("--out", o.out, "Output line-JSON")->required();
  add_detector_options(detect, o);

  auto* match = app.add_subcommand("match", "Line correspondences between the boundary frames");
  add_input_options(match, o);
  add_detector_options(match, o);
  add_match_options(match, o);
  add_mode_options(match, o);
  match->add_option("--out", o.out, "Output correspondence CSV")->required();

  auto* guide = app.add_subcommand("guide", "Interpolated line sets from correspondences");
  add_input_options(guide, o);
  add_flow_options(guide, o);
  add_detector_options(guide, o);
  add_mode_options(guide, o);
  add_trajectory_options(guide, o);
  guide->add_option("--pairs", o.pairs, "Correspondence CSV from `match`")->required();
  guide->add_option("--out", o.out, "Output guide directory")->required();

  auto* raster = app.add_subcommand("raster", "Edge maps and conditioning manifest from a guide");
  raster->add_option("--guide", o.guide, "Guide directory or guide.json")->required();
  raster->add_option("--frame-a", o.cfg.frame_a, "Last frame of clip A")->required();
  raster->add_option("--frame-b", o.cfg.frame_b, "First frame of clip B")->required();
  add_raster_options(raster, o);
  raster->add_option("--out", o.out, "Output directory")->required();

  auto* metrics = app.add_subcommand("metrics", "Flow cosine similarity (and crossings of a guide)");
  metrics->add_option("--ref", o.ref_flows, "Reference flows (.flo), in frame order")->required();
  metrics->add_option("--gen", o.gen_flows, "Generated flows (.flo), in frame order")->required();
  metrics->add_option("--guide", o.guide, "Guide directory to report crossing counts for");
  metrics->add_option("--json", o.report, "Write the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*run) return cmd_run(o);
    if (*detect) return cmd_detect(o);
    if (*match) return cmd_match(o);
    if (*guide) return cmd_guide(o);
    if (*raster) return cmd_raster(o);
    if (*metrics) return cmd_metrics(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::empty_correspondence ? kExitNoCorrespondence : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
