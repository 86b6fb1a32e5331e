#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace groove::wav {

enum class Encoding { kPcm16, kPcm24, kPcm32, kFloat32 };

struct Audio {
  int sample_rate = 0;
  int channels = 0;
  // Channel-interleaved samples scaled to [-1, 1].
  std::vector<float> interleaved;
};

// Decodes RIFF/WAVE, including WAVE_FORMAT_EXTENSIBLE headers. Accepts 1 or 2
// channels, PCM 16/24/32-bit or 32-bit IEEE float.
Audio read(const std::filesystem::path& path);
Audio decode(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode(const Audio& audio, Encoding encoding);
void write(const std::filesystem::path& path, const Audio& audio, Encoding encoding);

}  // namespace groove::wav
