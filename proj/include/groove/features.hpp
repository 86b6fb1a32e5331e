#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "groove/audio.hpp"
#include "groove/corpus.hpp"

namespace groove {

struct FeatureConfig {
  double frame_seconds = 0.05;
  double hop_fraction = 0.5;
  // Pulse-clarity lag search, in beats per minute.
  double min_bpm = 40.0;
  double max_bpm = 200.0;
  double min_pulse_seconds = 4.0;
  // Event picking: local maxima above mean + k * std over +/- window.
  double event_threshold_k = 1.0;
  double event_window_seconds = 1.0;
};

// Frequency interval in Hz. Bins with centre frequency f are included when
// lo <= f < hi, or lo <= f <= hi when include_hi is set.
struct Band {
  double lo = 0.0;
  double hi = 0.0;
  bool include_hi = false;
};

// The ten sub-bands, doubling from 50 Hz: [0,50), [50,100), [100,200), ...,
// [6400,12800), [12800, nyquist].
std::array<Band, 10> subband_ladder(double sample_rate);

// Magnitude spectra of Hann-windowed frames divided by the window sum: one
// row of L/2+1 bins per frame.
struct Spectrogram {
  std::size_t bins = 0;
  std::size_t frames = 0;
  double bin_hz = 0.0;
  double frame_rate = 0.0;
  std::vector<double> magnitudes;  // row-major, frames x bins

  std::span<const double> frame(std::size_t index) const {
    return std::span<const double>(magnitudes).subspan(index * bins, bins);
  }
};

Spectrogram magnitude_spectrogram(const Signal& signal, const FeatureConfig& config = {});

// Index range [first, last) of bins whose centre frequency lies in `band`.
// Throws InputError when the band leaves [0, nyquist].
std::pair<std::size_t, std::size_t> band_bins(const Spectrogram& spectrogram, const Band& band,
                                              double sample_rate);

// Euclidean distance between two spectra restricted to bins [first, last).
double spectral_distance(std::span<const double> a, std::span<const double> b,
                         std::size_t first, std::size_t last);

// Mean over successive frame pairs of the Euclidean distance between
// magnitude spectra, restricted to `band` when given.
double spectral_flux(const Signal& signal, const std::optional<Band>& band = std::nullopt,
                     const FeatureConfig& config = {});

std::array<double, 10> subband_flux_bank(const Signal& signal, const FeatureConfig& config = {});

enum class OnsetMode { kFlux, kAttack };

struct OnsetCurve {
  std::vector<double> values;
  double frame_rate = 0.0;
};

// kFlux: half-wave rectified spectral flux per frame. kAttack: half-wave
// rectified first difference of framed RMS. Value i describes the change
// from frame i to frame i+1. Normalized to a maximum of 1 unless all zero.
OnsetCurve onset_curve(const Signal& signal, OnsetMode mode, const FeatureConfig& config = {});

// Maximum normalized autocorrelation of the mean-removed onset curve over
// lags between 60/max_bpm and 60/min_bpm seconds, clamped to [0, 1].
double pulse_clarity(const Signal& signal, OnsetMode mode, const FeatureConfig& config = {});
double pulse_clarity(const OnsetCurve& curve, const FeatureConfig& config = {});

// Onsets per second picked from onset_curve(kFlux).
double event_density(const Signal& signal, const FeatureConfig& config = {});
// Indices of picked events on an onset curve.
std::vector<std::size_t> pick_events(const OnsetCurve& curve, const FeatureConfig& config = {});

double rms_global(const Signal& signal);
// Per-frame RMS values under the flux framing.
std::vector<double> frame_rms(const Signal& signal, const FeatureConfig& config = {});
// Population standard deviation of frame_rms.
double rms_frame_std(const Signal& signal, const FeatureConfig& config = {});

inline constexpr std::size_t kFeatureCount = 16;

// Column names in serialization order.
const std::array<std::string_view, kFeatureCount>& feature_names();

struct FeatureVector {
  std::string track_id;
  std::array<double, kFeatureCount> values{};
};

FeatureVector compute_features(std::string track_id, const Signal& signal,
                               const FeatureConfig& config = {});

// Loads the track's full mix at `sample_rate` and computes all 16 features.
FeatureVector extract_feature_vector(const Track& track, double sample_rate = kCanonicalSampleRate,
                                     const FeatureConfig& config = {});

}  // namespace groove
