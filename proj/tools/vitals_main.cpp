// vitals: heart-rate and respiration-rate extraction from facial video via
// mean-Hue iPPG, with a green-channel baseline, a synthetic ground-truth
// generator, and an RMSE evaluation harness.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vitals/error.hpp"
#include "vitals/estimator.hpp"
#include "vitals/eval.hpp"
#include "vitals/ingest.hpp"
#include "vitals/roi.hpp"
#include "vitals/signal.hpp"
#include "vitals/synth.hpp"

namespace {

struct StreamFlags {
  std::string input;
  std::string landmarks;
  std::vector<int> roi;  // L,T,R,B fixed-rectangle fallback
  double keep_rate = 1.0;
  std::uint64_t drop_seed = 0;
};

struct EstimateFlags {
  StreamFlags stream;
  std::string channel = "hue";
  std::vector<double> hue_mask{0.0, 0.1};
  double window_s = 11.0;
  std::vector<double> hr_band{0.8, 2.2};
  std::vector<double> rr_band{0.18, 0.5};
  double hr_warmup_s = 2.0;
  double rr_warmup_s = 6.0;
  int smooth_n = 10;
  double resample_hz = 9.0;
  int zero_pad_factor = 4;
  double max_gap_s = 0.5;
  int threads = 1;
  std::string out;
  std::string format = "jsonl";
};

void add_stream_flags(CLI::App* cmd, StreamFlags& f) {
  cmd->add_option("--input", f.input, "Input stream: .y4m file, sequence meta .json, or directory")
      ->required();
  cmd->add_option("--landmarks", f.landmarks, "Landmark sidecar (JSON lines, 68 points per row)");
  cmd->add_option("--roi", f.roi, "Fixed forehead rectangle L,T,R,B when no sidecar is available")
      ->delimiter(',')
      ->expected(4);
  cmd->add_option("--keep-rate", f.keep_rate, "Bernoulli frame-keep probability (drop simulation)")
      ->capture_default_str();
  cmd->add_option("--drop-seed", f.drop_seed, "Seed for the frame-drop pattern")
      ->capture_default_str();
}

void add_estimator_flags(CLI::App* cmd, EstimateFlags& f) {
  cmd->add_option("--channel", f.channel, "Observable: hue or green")
      ->check(CLI::IsMember({"hue", "green"}))
      ->capture_default_str();
  cmd->add_option("--hue-mask", f.hue_mask, "Hue mask bounds LO,HI (exclusive)")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  cmd->add_option("--window-s", f.window_s, "Sliding analysis window in seconds")
      ->capture_default_str();
  cmd->add_option("--hr-band", f.hr_band, "Heart-rate band LO,HI in Hz")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  cmd->add_option("--rr-band", f.rr_band, "Respiration band LO,HI in Hz")
      ->delimiter(',')
      ->expected(2)
      ->capture_default_str();
  cmd->add_option("--hr-warmup-s", f.hr_warmup_s, "Seconds before the first HR output")
      ->capture_default_str();
  cmd->add_option("--rr-warmup-s", f.rr_warmup_s, "Seconds before the first RR output")
      ->capture_default_str();
  cmd->add_option("--smooth-n", f.smooth_n, "Trailing raw estimates averaged per output")
      ->capture_default_str();
  cmd->add_option("--resample-hz", f.resample_hz, "Uniform resampling rate in Hz")
      ->capture_default_str();
  cmd->add_option("--zero-pad-factor", f.zero_pad_factor, "FFT zero-padding factor")
      ->capture_default_str();
  cmd->add_option("--max-gap-s", f.max_gap_s, "Gap length that switches to hold-fill")
      ->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads for per-frame ROI reduction")
      ->capture_default_str();
}

vitals::EstimatorConfig make_config(const EstimateFlags& f) {
  vitals::EstimatorConfig cfg;
  cfg.channel = f.channel == "hue" ? vitals::Channel::hue : vitals::Channel::green;
  cfg.window_s = f.window_s;
  cfg.hr_band = {f.hr_band[0], f.hr_band[1]};
  cfg.rr_band = {f.rr_band[0], f.rr_band[1]};
  cfg.hr_warmup_s = f.hr_warmup_s;
  cfg.rr_warmup_s = f.rr_warmup_s;
  cfg.smooth_n = f.smooth_n;
  cfg.resample_hz = f.resample_hz;
  cfg.zero_pad_factor = f.zero_pad_factor;
  cfg.max_gap_s = f.max_gap_s;
  cfg.hue_mask = {f.hue_mask[0], f.hue_mask[1], f.hue_mask[0] > f.hue_mask[1]};
  return cfg;
}

std::unique_ptr<vitals::FrameSource> open_flagged_stream(const StreamFlags& f) {
  auto stream = vitals::open_stream(f.input);
  if (f.keep_rate < 1.0) {
    stream = vitals::simulate_drops(std::move(stream), f.keep_rate, f.drop_seed);
  }
  return stream;
}

std::ostream& output_stream(const std::string& out, std::ofstream& file) {
  if (out.empty() || out == "-") return std::cout;
  file.open(out);
  if (!file) throw vitals::IoError("cannot write " + out);
  return file;
}

vitals::IppgSeries collect_series(vitals::FrameSource& stream,
                                  const std::vector<vitals::LandmarkSet>& landmarks,
                                  const EstimateFlags& f) {
  std::optional<vitals::ForeheadRect> fixed;
  if (!f.stream.roi.empty()) {
    fixed = vitals::ForeheadRect{f.stream.roi[0], f.stream.roi[1], f.stream.roi[2],
                                 f.stream.roi[3]};
  }
  if (!fixed && landmarks.empty()) {
    throw vitals::ConfigError("need --landmarks or --roi");
  }
  std::unordered_map<std::int64_t, const vitals::LandmarkSet*> by_frame;
  for (const auto& lm : landmarks) by_frame[lm.frame_index] = &lm;

  const vitals::HueMask mask{f.hue_mask[0], f.hue_mask[1], f.hue_mask[0] > f.hue_mask[1]};
  vitals::IppgSeries series;
  series.channel = f.channel == "hue" ? vitals::Channel::hue : vitals::Channel::green;
  while (auto frame = stream.next()) {
    const vitals::LandmarkSet* lm = nullptr;
    if (auto it = by_frame.find(frame->index); it != by_frame.end()) lm = it->second;
    if (!fixed && !lm) continue;
    const vitals::ForeheadRect rect =
        fixed ? *fixed : vitals::forehead_from_landmarks(*lm, frame->width, frame->height);
    const vitals::RoiSample s = series.channel == vitals::Channel::hue
                                    ? vitals::mean_hue_masked(*frame, rect, mask)
                                    : vitals::mean_green(*frame, rect);
    if (s.pixel_count > 0) series.push(s.timestamp_s, s.value);
  }
  return series;
}

int run_estimate(const EstimateFlags& f) {
  const auto landmarks = f.stream.landmarks.empty()
                             ? std::vector<vitals::LandmarkSet>{}
                             : vitals::parse_landmark_sidecar(f.stream.landmarks);
  auto stream = open_flagged_stream(f.stream);

  vitals::OfflineOptions opt;
  opt.threads = f.threads;
  if (!f.stream.roi.empty()) {
    opt.fixed_roi = vitals::ForeheadRect{f.stream.roi[0], f.stream.roi[1], f.stream.roi[2],
                                         f.stream.roi[3]};
  }
  const auto estimates = vitals::run_offline(*stream, landmarks, make_config(f), opt);

  std::ofstream file;
  std::ostream& out = output_stream(f.out, file);
  if (f.format == "csv") {
    out << vitals::kCsvHeader << "\n";
    for (const auto& e : estimates) out << vitals::to_csv_row(e) << "\n";
  } else {
    for (const auto& e : estimates) out << vitals::to_jsonl(e) << "\n";
  }
  return 0;
}

int run_spectrum(const EstimateFlags& f) {
  const auto landmarks = f.stream.landmarks.empty()
                             ? std::vector<vitals::LandmarkSet>{}
                             : vitals::parse_landmark_sidecar(f.stream.landmarks);
  auto stream = open_flagged_stream(f.stream);
  const vitals::IppgSeries series = collect_series(*stream, landmarks, f);
  const vitals::UniformSeries grid =
      vitals::resample_uniform(series, f.resample_hz, f.max_gap_s);
  const vitals::Spectrum sp = vitals::spectrum(grid, f.zero_pad_factor);

  std::ofstream file;
  std::ostream& out = output_stream(f.out, file);
  out << "freq_hz,magnitude\n";
  char row[64];
  for (Eigen::Index k = 0; k < sp.freqs_hz.size(); ++k) {
    std::snprintf(row, sizeof(row), "%.6f,%.9g\n", sp.freqs_hz[k], sp.mags[k]);
    out << row;
  }
  return 0;
}

struct SynthFlags {
  std::string out_dir;
  double hr_bpm = 66.0;
  double rr_bpm = 18.0;
  double hue_amp = 0.008;
  double green_amp = 2.0;
  std::vector<double> base_hsv{0.05, 0.35, 0.8};
  double noise_sigma = 0.0;
  bool drift = false;
  double drift_min = 0.7;
  double drift_max = 1.0;
  double drift_freq = 0.05;
  double fps = 30.0;
  double duration_s = 20.0;
  int width = 640;
  int height = 480;
  std::uint64_t seed = 0;
  std::string container = "y4m420";
};

int run_synth(const SynthFlags& f) {
  vitals::SynthSpec spec;
  spec.hr_hz = f.hr_bpm / 60.0;
  spec.rr_hz = f.rr_bpm / 60.0;
  spec.hue_amp = f.hue_amp;
  spec.green_amp = f.green_amp;
  spec.base_hsv = {f.base_hsv[0], f.base_hsv[1], f.base_hsv[2]};
  spec.noise_sigma = f.noise_sigma;
  if (f.drift) spec.brightness_drift = vitals::DriftSpec{f.drift_min, f.drift_max, f.drift_freq};
  spec.fps = f.fps;
  spec.duration_s = f.duration_s;
  spec.width = f.width;
  spec.height = f.height;
  spec.seed = f.seed;
  spec.container = f.container == "ppm"      ? vitals::SynthContainer::ppm_sequence
                   : f.container == "y4m444" ? vitals::SynthContainer::y4m444
                                             : vitals::SynthContainer::y4m420;

  const vitals::GroundTruth truth = vitals::generate(spec, f.out_dir);
  std::cout << "{\"stream\":\"" << truth.stream_path << "\",\"landmarks\":\""
            << truth.landmarks_path << "\",\"truth\":\"" << truth.truth_path << "\"}"
            << std::endl;
  return 0;
}

struct EvalFlags {
  std::string reference;
  std::string published;
  std::string estimates;
  std::string label = "estimate";
  std::string format = "json";
};

std::vector<vitals::ReferenceSeries> estimates_from_jsonl(const std::string& path,
                                                          const std::string& label) {
  std::ifstream in(path);
  if (!in) throw vitals::IoError("cannot open " + path);
  vitals::ReferenceSeries hr{label, vitals::Metric::hr, {}};
  vitals::ReferenceSeries rr{label, vitals::Metric::rr, {}};
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw vitals::ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const long t = j.at("t").get<long>();
    if (j.contains("hr") && !j["hr"].is_null()) hr.rows.emplace_back(t, j["hr"].get<double>());
    if (j.contains("rr") && !j["rr"].is_null()) rr.rows.emplace_back(t, j["rr"].get<double>());
  }
  std::vector<vitals::ReferenceSeries> out;
  if (!hr.rows.empty()) out.push_back(std::move(hr));
  if (!rr.rows.empty()) out.push_back(std::move(rr));
  return out;
}

int run_eval(const EvalFlags& f) {
  std::vector<vitals::ReferenceSeries> extra;
  if (!f.estimates.empty()) extra = estimates_from_jsonl(f.estimates, f.label);
  const auto report = vitals::table_report(
      f.reference, extra,
      f.published.empty() ? std::nullopt : std::optional<std::string>(f.published));
  if (f.format == "text") {
    std::cout << vitals::report_to_text(report);
  } else {
    std::cout << vitals::report_to_json(report) << std::endl;
    std::cerr << vitals::report_to_text(report);  // human-readable copy
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HR/RR extraction from facial video via mean-Hue iPPG"};
  app.require_subcommand(1);

  EstimateFlags est;
  CLI::App* estimate = app.add_subcommand("estimate", "Run the full pipeline, one JSONL row per second");
  add_stream_flags(estimate, est.stream);
  add_estimator_flags(estimate, est);
  estimate->add_option("--out", est.out, "Output path (default stdout)");
  estimate->add_option("--format", est.format, "Output format")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();

  EstimateFlags spec_flags;
  CLI::App* spectrum = app.add_subcommand("spectrum", "Dump the whole-clip iPPG spectrum as CSV");
  add_stream_flags(spectrum, spec_flags.stream);
  add_estimator_flags(spectrum, spec_flags);
  spectrum->add_option("--out", spec_flags.out, "Output path (default stdout)");

  SynthFlags syn;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic clip with known HR/RR");
  synth->add_option("--out", syn.out_dir, "Output directory")->required();
  synth->add_option("--hr-bpm", syn.hr_bpm, "Planted heart rate")->capture_default_str();
  synth->add_option("--rr-bpm", syn.rr_bpm, "Planted respiration rate")->capture_default_str();
  synth->add_option("--hue-amp", syn.hue_amp, "Hue oscillation amplitude")->capture_default_str();
  synth->add_option("--green-amp", syn.green_amp, "Green oscillation amplitude (8-bit units)")
      ->capture_default_str();
  synth->add_option("--base-hsv", syn.base_hsv, "Skin base color H,S,V")
      ->delimiter(',')
      ->expected(3)
      ->capture_default_str();
  synth->add_option("--noise-sigma", syn.noise_sigma, "Per-pixel Gaussian noise sigma")
      ->capture_default_str();
  synth->add_flag("--drift", syn.drift, "Enable multiplicative brightness drift");
  synth->add_option("--drift-min", syn.drift_min, "Drift gain minimum")->capture_default_str();
  synth->add_option("--drift-max", syn.drift_max, "Drift gain maximum")->capture_default_str();
  synth->add_option("--drift-freq", syn.drift_freq, "Drift frequency in Hz")->capture_default_str();
  synth->add_option("--fps", syn.fps, "Frames per second")->capture_default_str();
  synth->add_option("--duration-s", syn.duration_s, "Clip length in seconds")->capture_default_str();
  synth->add_option("--width", syn.width, "Frame width")->capture_default_str();
  synth->add_option("--height", syn.height, "Frame height")->capture_default_str();
  synth->add_option("--seed", syn.seed, "Noise seed")->capture_default_str();
  synth->add_option("--container", syn.container, "Output container")
      ->check(CLI::IsMember({"y4m420", "y4m444", "ppm"}))
      ->capture_default_str();

  EvalFlags ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score methods against the reference CSV");
  eval_cmd->add_option("--reference", ev.reference, "Reference CSV (hexoskin columns are truth)")
      ->required();
  eval_cmd->add_option("--published", ev.published, "Published RMSE JSON to cross-check");
  eval_cmd->add_option("--estimates", ev.estimates, "Estimate JSONL to score as an extra method");
  eval_cmd->add_option("--label", ev.label, "Method label for --estimates")->capture_default_str();
  eval_cmd->add_option("--format", ev.format, "Report format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the message or help text
    return code == 0 ? 0 : 1;     // any usage problem maps to exit 1
  }

  try {
    if (*estimate) return run_estimate(est);
    if (*spectrum) return run_spectrum(spec_flags);
    if (*synth) return run_synth(syn);
    if (*eval_cmd) return run_eval(ev);
  } catch (const vitals::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
