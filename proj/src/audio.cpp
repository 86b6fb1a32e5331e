#include "groove/audio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "groove/error.hpp"
#include "groove/wav.hpp"

namespace groove {
namespace {

// Kaiser window parameters for the anti-aliasing filter: 32 zero crossings per
// side and beta = 8.6 (about -85 dB stopband).
constexpr int kZeroCrossings = 32;
constexpr double kKaiserBeta = 8.6;
// Fraction of the lower Nyquist frequency kept as passband.
constexpr double kRolloff = 0.95;

double kaiser(double x, double half_width) {
  const double r = x / half_width;
  if (std::abs(r) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) /
         std::cyl_bessel_i(0.0, kKaiserBeta);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

Signal::Signal(std::vector<float> samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw InputError("sample rate must be positive");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw InputError("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::vector<float> resample(std::span<const float> input, int source_rate, int target_rate) {
  if (source_rate <= 0 || target_rate <= 0) {
    throw InputError("sample rates must be positive");
  }
  if (source_rate == target_rate) {
    return {input.begin(), input.end()};
  }
  const int g = std::gcd(source_rate, target_rate);
  const long up = target_rate / g;
  const long down = source_rate / g;

  // Cutoff in cycles per input sample.
  const double cutoff = 0.5 * kRolloff * std::min(1.0, static_cast<double>(up) / down);
  const double half_width = kZeroCrossings / (2.0 * cutoff);  // in input samples
  const long taps_per_phase = static_cast<long>(std::ceil(half_width)) * 2 + 1;
  const long half_taps = taps_per_phase / 2;

  // Polyphase table: phase p holds taps for output positions with fractional
  // offset p / up between input samples.
  std::vector<double> table(static_cast<std::size_t>(up * taps_per_phase));
  for (long p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    for (long t = 0; t < taps_per_phase; ++t) {
      const double x = static_cast<double>(t - half_taps) - frac;
      table[static_cast<std::size_t>(p * taps_per_phase + t)] =
          2.0 * cutoff * sinc(2.0 * cutoff * x) * kaiser(x, half_width);
    }
  }

  const auto n = static_cast<long>(input.size());
  const long out_len = (n * up + down - 1) / down;
  std::vector<float> output(static_cast<std::size_t>(out_len));
  for (long m = 0; m < out_len; ++m) {
    const long numerator = m * down;
    const long base = numerator / up;
    const long phase = numerator % up;
    const double* h = &table[static_cast<std::size_t>(phase * taps_per_phase)];
    double acc = 0.0;
    const long first = std::max(0L, half_taps - base);
    const long last = std::min(taps_per_phase, n - base + half_taps);
    for (long t = first; t < last; ++t) {
      acc += h[t] * input[static_cast<std::size_t>(base + t - half_taps)];
    }
    output[static_cast<std::size_t>(m)] = static_cast<float>(std::clamp(acc, -1.0, 1.0));
  }
  return output;
}

Signal load_audio(const std::filesystem::path& path, double target_rate) {
  if (!(target_rate > 0.0) || target_rate != std::floor(target_rate)) {
    throw InputError("target sample rate must be a positive integer");
  }
  const wav::Audio audio = wav::read(path);
  const std::size_t frames = audio.interleaved.size() / static_cast<std::size_t>(audio.channels);
  std::vector<float> mono(frames);
  if (audio.channels == 1) {
    mono = audio.interleaved;
  } else {
    for (std::size_t i = 0; i < frames; ++i) {
      mono[i] = (audio.interleaved[2 * i] + audio.interleaved[2 * i + 1]) * 0.5f;
    }
  }
  return Signal(resample(mono, audio.sample_rate, static_cast<int>(target_rate)), target_rate);
}

Frames::Frames(std::span<const float> samples, std::size_t length, std::size_t hop)
    : samples_(samples), length_(length), hop_(hop) {
  if (length_ < 2 || hop_ < 1) {
    throw InputError("frame length must be at least 2 samples");
  }
  if (samples_.size() < length_) {
    throw InputError("signal of " + std::to_string(samples_.size()) +
                     " samples is shorter than one frame (" + std::to_string(length_) + ")");
  }
  count_ = (samples_.size() - length_) / hop_ + 1;
}

Frames frame_signal(const Signal& signal, double frame_seconds, double hop_fraction) {
  if (!(hop_fraction > 0.0 && hop_fraction <= 1.0)) {
    throw InputError("hop fraction must lie in (0, 1]");
  }
  const auto length = static_cast<std::size_t>(std::llround(frame_seconds * signal.sample_rate()));
  if (length < 2) {
    throw InputError("frame must span at least 2 samples");
  }
  const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(length * hop_fraction)));
  return Frames(signal.samples(), length, hop);
}

}  // namespace groove
