#include "groove/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include <fftw3.h>

#include "groove/error.hpp"

namespace groove {
namespace {

// FFTW planning is not thread-safe; executing a finished plan on new arrays
// is. Plans are created once per length and kept for the process lifetime.
// FFTW_UNALIGNED keeps results independent of buffer alignment.
class RealFftPlans {
 public:
  static fftw_plan get(std::size_t length) {
    static RealFftPlans instance;
    std::lock_guard lock(instance.mutex_);
    auto it = instance.plans_.find(length);
    if (it != instance.plans_.end()) return it->second;
    std::vector<double> in(length);
    std::vector<std::complex<double>> out(length / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(length), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    instance.plans_.emplace(length, plan);
    return plan;
  }

 private:
  RealFftPlans() = default;
  ~RealFftPlans() {
    for (auto& [length, plan] : plans_) fftw_destroy_plan(plan);
  }
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

std::vector<double> hann(std::size_t length) {
  std::vector<double> w(length);
  const double denom = static_cast<double>(length - 1);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom));
  }
  return w;
}

void require_frames(const Frames& frames, std::size_t minimum, const char* what) {
  if (frames.count() < minimum) {
    throw InputError(std::string(what) + " needs at least " + std::to_string(minimum) +
                     " frames, signal has " + std::to_string(frames.count()));
  }
}

Frames flux_frames(const Signal& signal, const FeatureConfig& config) {
  return frame_signal(signal, config.frame_seconds, config.hop_fraction);
}

double flux_from_spectrogram(const Spectrogram& spec, std::size_t first, std::size_t last) {
  double total = 0.0;
  for (std::size_t t = 1; t < spec.frames; ++t) {
    total += spectral_distance(spec.frame(t - 1), spec.frame(t), first, last);
  }
  return total / static_cast<double>(spec.frames - 1);
}

void normalize_by_max(std::vector<double>& values) {
  const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  if (peak > 0.0) {
    for (double& v : values) v /= peak;
  }
}

OnsetCurve flux_onsets(const Spectrogram& spec) {
  OnsetCurve curve;
  curve.frame_rate = spec.frame_rate;
  curve.values.resize(spec.frames - 1);
  for (std::size_t t = 0; t + 1 < spec.frames; ++t) {
    const auto a = spec.frame(t);
    const auto b = spec.frame(t + 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < spec.bins; ++k) {
      const double rise = std::max(0.0, b[k] - a[k]);
      sum += rise * rise;
    }
    curve.values[t] = std::sqrt(sum);
  }
  normalize_by_max(curve.values);
  return curve;
}

OnsetCurve attack_onsets(const std::vector<double>& rms, double frame_rate) {
  OnsetCurve curve;
  curve.frame_rate = frame_rate;
  curve.values.resize(rms.size() - 1);
  for (std::size_t t = 0; t + 1 < rms.size(); ++t) {
    curve.values[t] = std::max(0.0, rms[t + 1] - rms[t]);
  }
  normalize_by_max(curve.values);
  return curve;
}

double population_std(const std::vector<double>& values) {
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / values.size());
}

void require_duration(const Signal& signal, double seconds, const char* what) {
  if (signal.duration() < seconds) {
    throw InputError(std::string(what) + " needs at least " + std::to_string(seconds) +
                     " s of audio, got " + std::to_string(signal.duration()) + " s");
  }
}

}  // namespace

std::array<Band, 10> subband_ladder(double sample_rate) {
  std::array<Band, 10> bands;
  bands[0] = {0.0, 50.0, false};
  double lo = 50.0;
  for (std::size_t i = 1; i < bands.size(); ++i) {
    bands[i] = {lo, 2.0 * lo, false};
    lo *= 2.0;
  }
  bands.back() = {12800.0, sample_rate / 2.0, true};
  return bands;
}

Spectrogram magnitude_spectrogram(const Signal& signal, const FeatureConfig& config) {
  const Frames frames = flux_frames(signal, config);
  const std::size_t length = frames.length();
  const std::vector<double> window = hann(length);
  // Amplitude scaling: a unit sine centred on a bin peaks at 0.5.
  const double scale = 1.0 / std::accumulate(window.begin(), window.end(), 0.0);
  fftw_plan plan = RealFftPlans::get(length);

  Spectrogram spec;
  spec.bins = length / 2 + 1;
  spec.frames = frames.count();
  spec.bin_hz = signal.sample_rate() / static_cast<double>(length);
  spec.frame_rate = signal.sample_rate() / static_cast<double>(frames.hop());
  spec.magnitudes.resize(spec.bins * spec.frames);

  std::vector<double> in(length);
  std::vector<std::complex<double>> out(spec.bins);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    const auto frame = frames[t];
    for (std::size_t n = 0; n < length; ++n) in[n] = frame[n] * window[n];
    fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    double* row = spec.magnitudes.data() + t * spec.bins;
    for (std::size_t k = 0; k < spec.bins; ++k) row[k] = std::abs(out[k]) * scale;
  }
  return spec;
}

std::pair<std::size_t, std::size_t> band_bins(const Spectrogram& spectrogram, const Band& band,
                                              double sample_rate) {
  const double nyquist = sample_rate / 2.0;
  if (band.lo < 0.0 || band.hi > nyquist * (1.0 + 1e-12) || !(band.lo < band.hi)) {
    throw InputError("band [" + std::to_string(band.lo) + ", " + std::to_string(band.hi) +
                     "] outside [0, " + std::to_string(nyquist) + "]");
  }
  std::size_t first = spectrogram.bins;
  std::size_t last = 0;
  for (std::size_t k = 0; k < spectrogram.bins; ++k) {
    const double f = static_cast<double>(k) * spectrogram.bin_hz;
    const bool inside = f >= band.lo && (band.include_hi ? f <= band.hi : f < band.hi);
    if (inside) {
      first = std::min(first, k);
      last = k + 1;
    }
  }
  if (first >= last) return {0, 0};
  return {first, last};
}

double spectral_distance(std::span<const double> a, std::span<const double> b, std::size_t first,
                         std::size_t last) {
  double sum = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const double d = b[k] - a[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double spectral_flux(const Signal& signal, const std::optional<Band>& band,
                     const FeatureConfig& config) {
  require_frames(flux_frames(signal, config), 2, "spectral flux");
  const Spectrogram spec = magnitude_spectrogram(signal, config);
  std::size_t first = 0;
  std::size_t last = spec.bins;
  if (band) std::tie(first, last) = band_bins(spec, *band, signal.sample_rate());
  return flux_from_spectrogram(spec, first, last);
}

std::array<double, 10> subband_flux_bank(const Signal& signal, const FeatureConfig& config) {
  require_frames(flux_frames(signal, config), 2, "sub-band flux");
  const Spectrogram spec = magnitude_spectrogram(signal, config);
  std::array<double, 10> values{};
  const auto bands = subband_ladder(signal.sample_rate());
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto [first, last] = band_bins(spec, bands[i], signal.sample_rate());
    values[i] = flux_from_spectrogram(spec, first, last);
  }
  return values;
}

OnsetCurve onset_curve(const Signal& signal, OnsetMode mode, const FeatureConfig& config) {
  const Frames frames = flux_frames(signal, config);
  require_frames(frames, 2, "onset curve");
  if (mode == OnsetMode::kFlux) {
    return flux_onsets(magnitude_spectrogram(signal, config));
  }
  return attack_onsets(frame_rms(signal, config),
                       signal.sample_rate() / static_cast<double>(frames.hop()));
}

double pulse_clarity(const OnsetCurve& curve, const FeatureConfig& config) {
  const std::size_t n = curve.values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(curve.values.begin(), curve.values.end(), 0.0) / n;
  std::vector<double> centered(n);
  double energy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    centered[t] = curve.values[t] - mean;
    energy += centered[t] * centered[t];
  }
  if (!(energy > 0.0)) return 0.0;

  const auto min_lag = static_cast<std::size_t>(std::ceil(60.0 / config.max_bpm * curve.frame_rate));
  const auto max_lag = std::min<std::size_t>(
      n - 1, static_cast<std::size_t>(std::floor(60.0 / config.min_bpm * curve.frame_rate)));
  double best = 0.0;
  for (std::size_t lag = std::max<std::size_t>(min_lag, 1); lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += centered[t] * centered[t + lag];
    best = std::max(best, acc / energy);
  }
  return std::clamp(best, 0.0, 1.0);
}

double pulse_clarity(const Signal& signal, OnsetMode mode, const FeatureConfig& config) {
  require_duration(signal, config.min_pulse_seconds, "pulse clarity");
  return pulse_clarity(onset_curve(signal, mode, config), config);
}

std::vector<std::size_t> pick_events(const OnsetCurve& curve, const FeatureConfig& config) {
  const auto& c = curve.values;
  const std::size_t n = c.size();
  const auto half = static_cast<std::size_t>(std::llround(config.event_window_seconds * curve.frame_rate));
  std::vector<std::size_t> events;
  for (std::size_t t = 0; t < n; ++t) {
    const double left = t > 0 ? c[t - 1] : 0.0;
    const double right = t + 1 < n ? c[t + 1] : 0.0;
    if (!(c[t] > left && c[t] > right)) continue;
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(n, t + half + 1);
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += c[i];
    const double mean = sum / static_cast<double>(hi - lo);
    double ss = 0.0;
    for (std::size_t i = lo; i < hi; ++i) ss += (c[i] - mean) * (c[i] - mean);
    const double std = std::sqrt(ss / static_cast<double>(hi - lo));
    if (c[t] > mean + config.event_threshold_k * std) events.push_back(t);
  }
  return events;
}

double event_density(const Signal& signal, const FeatureConfig& config) {
  require_duration(signal, 1.0, "event density");
  const OnsetCurve curve = onset_curve(signal, OnsetMode::kFlux, config);
  return static_cast<double>(pick_events(curve, config).size()) / signal.duration();
}

double rms_global(const Signal& signal) {
  if (signal.size() == 0) throw InputError("RMS of an empty signal");
  double sum = 0.0;
  for (float s : signal.samples()) sum += static_cast<double>(s) * s;
  return std::sqrt(sum / static_cast<double>(signal.size()));
}

std::vector<double> frame_rms(const Signal& signal, const FeatureConfig& config) {
  const Frames frames = flux_frames(signal, config);
  std::vector<double> values(frames.count());
  for (std::size_t t = 0; t < frames.count(); ++t) {
    double sum = 0.0;
    for (float s : frames[t]) sum += static_cast<double>(s) * s;
    values[t] = std::sqrt(sum / static_cast<double>(frames.length()));
  }
  return values;
}

double rms_frame_std(const Signal& signal, const FeatureConfig& config) {
  require_frames(flux_frames(signal, config), 2, "frame RMS deviation");
  return population_std(frame_rms(signal, config));
}

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "flux_global",   "flux_band_1",   "flux_band_2",          "flux_band_3",
      "flux_band_4",   "flux_band_5",   "flux_band_6",          "flux_band_7",
      "flux_band_8",   "flux_band_9",   "flux_band_10",         "pulse_clarity",
      "pulse_clarity_attack", "event_density", "rms_global",    "rms_frame_std"};
  return names;
}

FeatureVector compute_features(std::string track_id, const Signal& signal,
                               const FeatureConfig& config) {
  if (signal.size() == 0) throw InputError("empty signal");
  require_duration(signal, config.min_pulse_seconds, "feature extraction");
  const Frames frames = flux_frames(signal, config);
  require_frames(frames, 2, "feature extraction");

  const Spectrogram spec = magnitude_spectrogram(signal, config);
  const std::vector<double> rms = frame_rms(signal, config);

  FeatureVector fv;
  fv.track_id = std::move(track_id);
  auto& v = fv.values;
  v[0] = flux_from_spectrogram(spec, 0, spec.bins);
  const auto bands = subband_ladder(signal.sample_rate());
  for (std::size_t i = 0; i < bands.size(); ++i) {
    const auto [first, last] = band_bins(spec, bands[i], signal.sample_rate());
    v[1 + i] = flux_from_spectrogram(spec, first, last);
  }
  const OnsetCurve flux_curve = flux_onsets(spec);
  v[11] = pulse_clarity(flux_curve, config);
  v[12] = pulse_clarity(attack_onsets(rms, spec.frame_rate), config);
  v[13] = static_cast<double>(pick_events(flux_curve, config).size()) / signal.duration();
  v[14] = rms_global(signal);
  v[15] = population_std(rms);
  return fv;
}

FeatureVector extract_feature_vector(const Track& track, double sample_rate,
                                     const FeatureConfig& config) {
  return compute_features(track.id, load_audio(track.audio_path, sample_rate), config);
}

}  // namespace groove
