#include "vitals/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <unordered_map>

#include "vitals/error.hpp"

namespace vitals {

void EstimatorConfig::validate() const {
  if (!(hr_warmup_s <= rr_warmup_s && rr_warmup_s <= window_s)) {
    throw ConfigError("config: need hr_warmup_s <= rr_warmup_s <= window_s");
  }
  if (smooth_n < 1) throw ConfigError("config: smooth_n must be >= 1");
  if (!(hr_band.lo_hz > 0 && hr_band.lo_hz < hr_band.hi_hz)) {
    throw ConfigError("config: invalid hr_band");
  }
  if (!(rr_band.lo_hz > 0 && rr_band.lo_hz < rr_band.hi_hz)) {
    throw ConfigError("config: invalid rr_band");
  }
  if (resample_hz <= 2.0 * hr_band.hi_hz) {
    throw ConfigError("config: resample_hz must exceed twice the hr_band top (" +
                      std::to_string(2.0 * hr_band.hi_hz) + " Hz)");
  }
  if (zero_pad_factor < 1) throw ConfigError("config: zero_pad_factor must be >= 1");
  if (max_gap_s <= 0) throw ConfigError("config: max_gap_s must be positive");
  if (!hue_mask.wrap && !(hue_mask.lo < hue_mask.hi)) {
    throw ConfigError("config: hue mask needs lo < hi unless it wraps");
  }
}

const char* to_string(AbsentReason r) {
  switch (r) {
    case AbsentReason::warming_up: return "warming-up";
    case AbsentReason::flat_signal: return "flat-signal";
    case AbsentReason::no_face: return "no-face";
    case AbsentReason::insufficient_band_resolution: return "insufficient-band-resolution";
    case AbsentReason::insufficient_data: return "insufficient-data";
  }
  return "unknown";
}

Estimator::Estimator(EstimatorConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

double Estimator::RateState::push(double raw, int smooth_n) {
  raws.push_back(raw);
  while (static_cast<int>(raws.size()) > smooth_n) raws.pop_front();
  double sum = 0.0;
  for (double r : raws) sum += r;
  return sum / static_cast<double>(raws.size());
}

std::optional<double> Estimator::raw_rate(const Band& band,
                                          std::optional<AbsentReason>& reason) const {
  IppgSeries series;
  series.channel = cfg_.channel;
  for (const RoiSample& s : window_) series.push(s.timestamp_s, s.value);

  try {
    const UniformSeries grid = resample_uniform(series, cfg_.resample_hz, cfg_.max_gap_s);
    const Spectrum sp = spectrum(grid, cfg_.zero_pad_factor);
    const BandPeak peak = band_peak(sp, band);
    // a genuinely flat window leaves only rounding residue in the spectrum;
    // a band whose maximum is a sliver of the strongest spectral line holds
    // only leakage from content elsewhere, not a peak of its own
    const double flat_eps = 1e-9 * std::max(1.0, std::fabs(grid.values.mean()));
    if (peak.mag < flat_eps || peak.mag < kMinPeakProminence * sp.mags.maxCoeff()) {
      if (!reason) reason = AbsentReason::flat_signal;
      return std::nullopt;
    }
    return peak.rate_per_min;
  } catch (const InsufficientDataError&) {
    if (!reason) reason = AbsentReason::insufficient_data;
  } catch (const BandResolutionError&) {
    if (!reason) reason = AbsentReason::insufficient_band_resolution;
  }
  return std::nullopt;
}

std::optional<VitalsEstimate> Estimator::push_sample(const RoiSample& s) {
  if (any_pushed_ && s.timestamp_s < last_t_) {
    throw OrderingError("push_sample: timestamp " + std::to_string(s.timestamp_s) +
                        " behind " + std::to_string(last_t_));
  }
  // the first sample's own second counts as already emitted
  const long prev_second = static_cast<long>(std::floor(any_pushed_ ? last_t_ : s.timestamp_s));
  last_t_ = s.timestamp_s;
  any_pushed_ = true;

  window_.push_back(s);
  const double horizon = s.timestamp_s - cfg_.window_s;
  while (!window_.empty() && window_.front().timestamp_s < horizon) window_.pop_front();

  const long second = static_cast<long>(std::floor(s.timestamp_s));
  if (second <= prev_second) return std::nullopt;

  VitalsEstimate est;
  est.t_s = second;
  est.channel = cfg_.channel;
  est.sample_count = static_cast<long>(window_.size());
  const double span = window_.back().timestamp_s - window_.front().timestamp_s;
  est.window_used_s = span;

  std::optional<AbsentReason> reason;
  const bool hr_due = static_cast<double>(second) >= cfg_.hr_warmup_s &&
                      span >= cfg_.hr_warmup_s;
  const bool rr_due = static_cast<double>(second) >= cfg_.rr_warmup_s &&
                      span >= cfg_.rr_warmup_s;

  if (hr_due) {
    est.hr_raw = raw_rate(cfg_.hr_band, reason);
    if (est.hr_raw) est.hr_bpm = hr_.push(*est.hr_raw, cfg_.smooth_n);
  } else {
    reason = AbsentReason::warming_up;
  }
  if (rr_due) {
    est.rr_raw = raw_rate(cfg_.rr_band, reason);
    if (est.rr_raw) est.rr_bpm = rr_.push(*est.rr_raw, cfg_.smooth_n);
  } else if (!reason) {
    reason = AbsentReason::warming_up;
  }

  if (!est.hr_bpm || !est.rr_bpm) est.reason = reason;
  return est;
}

namespace {

RoiSample reduce_frame(const Frame& f, const ForeheadRect& rect, const EstimatorConfig& cfg) {
  return cfg.channel == Channel::hue ? mean_hue_masked(f, rect, cfg.hue_mask)
                                     : mean_green(f, rect);
}

}  // namespace

std::vector<VitalsEstimate> run_offline(FrameSource& stream,
                                        const std::vector<LandmarkSet>& landmarks,
                                        const EstimatorConfig& cfg,
                                        const OfflineOptions& opt) {
  cfg.validate();
  if (!opt.fixed_roi && landmarks.empty()) {
    throw ConfigError("run_offline: need a landmark sidecar or a fixed ROI");
  }

  std::unordered_map<std::int64_t, const LandmarkSet*> by_frame;
  by_frame.reserve(landmarks.size());
  for (const LandmarkSet& lm : landmarks) by_frame[lm.frame_index] = &lm;

  Estimator estimator(cfg);
  std::vector<VitalsEstimate> out;
  long frames_seen = 0;
  double last_frame_t = 0.0;
  long next_expected_second = 1;

  auto emit = [&](std::optional<VitalsEstimate> est) {
    if (!est) return;
    // seconds the estimator never saw produce explicit no-face rows
    for (; next_expected_second < est->t_s; ++next_expected_second) {
      VitalsEstimate gap;
      gap.t_s = next_expected_second;
      gap.reason = AbsentReason::no_face;
      gap.channel = cfg.channel;
      out.push_back(gap);
    }
    next_expected_second = est->t_s + 1;
    out.push_back(*est);
  };

  auto reduce_batch = [&](std::vector<Frame>& batch) {
    std::vector<std::optional<RoiSample>> samples(batch.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const Frame& f = batch[i];
        const LandmarkSet* lm = nullptr;
        if (auto it = by_frame.find(f.index); it != by_frame.end()) lm = it->second;
        if (!opt.fixed_roi && !lm) continue;  // no face this frame
        const ForeheadRect rect =
            opt.fixed_roi ? *opt.fixed_roi : forehead_from_landmarks(*lm, f.width, f.height);
        const RoiSample s = reduce_frame(f, rect, cfg);
        if (s.pixel_count > 0) samples[i] = s;
      }
    };
    const int threads = std::max(1, opt.threads);
    if (threads == 1 || batch.size() < 2) {
      work(0, batch.size());
    } else {
      const std::size_t chunk = (batch.size() + threads - 1) / threads;
      std::vector<std::future<void>> futures;
      for (std::size_t lo = 0; lo < batch.size(); lo += chunk) {
        const std::size_t hi = std::min(lo + chunk, batch.size());
        futures.push_back(std::async(std::launch::async, work, lo, hi));
      }
      for (auto& f : futures) f.get();
    }
    // re-sequenced by frame order before pushing, so threading cannot reorder
    for (const auto& s : samples) {
      if (s) emit(estimator.push_sample(*s));
    }
    batch.clear();
  };

  constexpr std::size_t kBatch = 64;
  std::vector<Frame> batch;
  batch.reserve(kBatch);
  while (auto frame = stream.next()) {
    ++frames_seen;
    last_frame_t = frame->timestamp_s;
    batch.push_back(std::move(*frame));
    if (batch.size() >= kBatch) reduce_batch(batch);
  }
  reduce_batch(batch);

  if (frames_seen == 0) {
    throw InsufficientDataError("run_offline: stream produced no frames");
  }

  // trailing seconds with frames but no estimator output
  for (; next_expected_second <= static_cast<long>(std::floor(last_frame_t));
       ++next_expected_second) {
    VitalsEstimate gap;
    gap.t_s = next_expected_second;
    gap.reason = AbsentReason::no_face;
    gap.channel = cfg.channel;
    out.push_back(gap);
  }
  return out;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", *v);
  return buf;
}

}  // namespace

std::string to_jsonl(const VitalsEstimate& e) {
  std::string s = "{\"t\":" + std::to_string(e.t_s);
  s += ",\"hr\":" + fmt_opt(e.hr_bpm);
  s += ",\"rr\":" + fmt_opt(e.rr_bpm);
  s += ",\"hr_raw\":" + fmt_opt(e.hr_raw);
  s += ",\"rr_raw\":" + fmt_opt(e.rr_raw);
  s += ",\"reason\":";
  s += e.reason ? "\"" + std::string(to_string(*e.reason)) + "\"" : "null";
  s += ",\"channel\":\"";
  s += e.channel == Channel::hue ? "hue" : "green";
  s += "\",\"samples\":" + std::to_string(e.sample_count) + "}";
  return s;
}

std::string to_csv_row(const VitalsEstimate& e) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *v);
    return std::string(buf);
  };
  std::string s = std::to_string(e.t_s);
  s += "," + cell(e.hr_bpm) + "," + cell(e.rr_bpm);
  s += "," + cell(e.hr_raw) + "," + cell(e.rr_raw) + ",";
  if (e.reason) s += to_string(*e.reason);
  s += ",";
  s += e.channel == Channel::hue ? "hue" : "green";
  s += "," + std::to_string(e.sample_count);
  return s;
}

}  // namespace vitals
