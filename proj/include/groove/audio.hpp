#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace groove {

inline constexpr double kCanonicalSampleRate = 44100.0;

// Mono floating point audio. Samples are finite and within [-1, 1].
class Signal {
 public:
  Signal() = default;
  // Throws InputError on a non-positive rate or non-finite samples.
  Signal(std::vector<float> samples, double sample_rate);

  std::span<const float> samples() const { return samples_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t size() const { return samples_.size(); }
  double duration() const { return static_cast<double>(samples_.size()) / sample_rate_; }

 private:
  std::vector<float> samples_;
  double sample_rate_ = kCanonicalSampleRate;
};

// Reads a WAV file, averages channels to mono and resamples to target_rate.
Signal load_audio(const std::filesystem::path& path,
                  double target_rate = kCanonicalSampleRate);

// Windowed-sinc (Kaiser) polyphase resampling between integer rates.
// Output length is ceil(n * target / source). Results are clamped to [-1, 1].
std::vector<float> resample(std::span<const float> input, int source_rate, int target_rate);

// Fixed-length frames over a signal; the trailing partial frame is dropped.
class Frames {
 public:
  Frames(std::span<const float> samples, std::size_t length, std::size_t hop);

  std::size_t count() const { return count_; }
  std::size_t length() const { return length_; }
  std::size_t hop() const { return hop_; }
  std::span<const float> operator[](std::size_t index) const {
    return samples_.subspan(index * hop_, length_);
  }

 private:
  std::span<const float> samples_;
  std::size_t length_;
  std::size_t hop_;
  std::size_t count_;
};

// Frame length L = round(frame_seconds * rate), hop H = round(L * hop_fraction).
// The Frames view borrows from `signal`, which must outlive it.
Frames frame_signal(const Signal& signal, double frame_seconds, double hop_fraction);

}  // namespace groove
