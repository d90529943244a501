#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "vitals/ingest.hpp"
#include "vitals/roi.hpp"
#include "vitals/signal.hpp"

namespace vitals {

struct EstimatorConfig {
  Channel channel = Channel::hue;
  double window_s = 11.0;
  Band hr_band{0.8, 2.2};
  Band rr_band{0.18, 0.5};
  double hr_warmup_s = 2.0;
  double rr_warmup_s = 6.0;
  int smooth_n = 10;
  double resample_hz = 9.0;
  int zero_pad_factor = 4;
  double max_gap_s = 0.5;
  HueMask hue_mask{0.0, 0.1, false};

  void validate() const;  // throws ConfigError
};

enum class AbsentReason {
  warming_up,
  flat_signal,
  no_face,
  insufficient_band_resolution,
  insufficient_data,
};

// A band peak below this fraction of the strongest spectral magnitude is
// treated as leakage rather than a real component (Hann sidelobes sit around
// 0.3%, a genuine half-amplitude component around 50%).
inline constexpr double kMinPeakProminence = 0.05;

const char* to_string(AbsentReason r);

// One per-second output row. hr_bpm/rr_bpm are the smoothed values (mean of
// up to smooth_n trailing raws); absent before warm-up or when the window
// cannot support an estimate, with reason saying why.
struct VitalsEstimate {
  long t_s = 0;
  std::optional<double> hr_bpm;
  std::optional<double> rr_bpm;
  std::optional<double> hr_raw;
  std::optional<double> rr_raw;
  std::optional<AbsentReason> reason;
  double window_used_s = 0.0;
  long sample_count = 0;
  Channel channel = Channel::hue;
};

// Sliding-window spectral estimator. Single writer: samples must arrive in
// timestamp order; an estimate is emitted whenever a pushed sample crosses a
// whole-second boundary.
class Estimator {
public:
  explicit Estimator(EstimatorConfig cfg);

  // Throws OrderingError on a timestamp behind the previous push.
  std::optional<VitalsEstimate> push_sample(const RoiSample& s);

  const EstimatorConfig& config() const { return cfg_; }

private:
  struct RateState {
    std::deque<double> raws;  // trailing raw values, newest last
    double push(double raw, int smooth_n);
  };

  std::optional<double> raw_rate(const Band& band,
                                 std::optional<AbsentReason>& reason) const;

  EstimatorConfig cfg_;
  std::deque<RoiSample> window_;
  RateState hr_, rr_;
  double last_t_ = 0.0;
  bool any_pushed_ = false;
};

struct OfflineOptions {
  std::optional<ForeheadRect> fixed_roi;  // overrides landmark-driven geometry
  int threads = 1;
};

// Batch driver: ingest -> roi -> estimator. Deterministic for fixed inputs
// and config, independent of the thread count. Seconds that produce no
// estimator output are reported with reason "no_face".
std::vector<VitalsEstimate> run_offline(FrameSource& stream,
                                        const std::vector<LandmarkSet>& landmarks,
                                        const EstimatorConfig& cfg,
                                        const OfflineOptions& opt = {});

// Fixed field order and fixed precision so identical runs emit identical bytes.
std::string to_jsonl(const VitalsEstimate& e);
std::string to_csv_row(const VitalsEstimate& e);
inline constexpr const char* kCsvHeader = "t,hr,rr,hr_raw,rr_raw,reason,channel,samples";

}  // namespace vitals
