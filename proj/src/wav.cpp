#include "groove/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "groove/error.hpp"
#include "groove/output.hpp"

namespace groove::wav {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

float decode_sample(const std::uint8_t* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    float value;
    const std::uint32_t raw = read_u32(p);
    std::memcpy(&value, &raw, sizeof(value));
    return value;
  }
  switch (bits) {
    case 16:
      return static_cast<float>(static_cast<std::int16_t>(read_u16(p)) / 32768.0);
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<float>(v / 8388608.0);
    }
    default:
      return static_cast<float>(static_cast<std::int32_t>(read_u32(p)) / 2147483648.0);
  }
}

}  // namespace

Audio decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw InputError("not a RIFF/WAVE file");
  }
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  bool have_fmt = false;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min<std::size_t>(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) throw InputError("truncated fmt chunk");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible) {
        if (available < 40) throw InputError("truncated WAVE_FORMAT_EXTENSIBLE header");
        // The first two bytes of the sub-format GUID carry the format tag.
        format = read_u16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.subspan(body, available);
      have_data = true;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) throw InputError("missing fmt or data chunk");
  if (channels < 1 || channels > 2) {
    throw InputError("unsupported channel count " + std::to_string(channels));
  }
  const bool pcm_ok = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && bits == 32;
  if (!pcm_ok && !float_ok) {
    throw InputError("unsupported encoding (format " + std::to_string(format) + ", " +
                     std::to_string(bits) + " bits)");
  }
  if (rate == 0) throw InputError("sample rate is zero");

  const std::size_t width = bits / 8;
  const std::size_t count = data.size() / width / channels * channels;
  if (count == 0) throw InputError("zero-length audio");

  Audio audio;
  audio.sample_rate = static_cast<int>(rate);
  audio.channels = channels;
  audio.interleaved.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float v = decode_sample(data.data() + i * width, format, bits);
    if (!std::isfinite(v)) {
      throw InputError("non-finite sample at index " + std::to_string(i));
    }
    audio.interleaved[i] = std::clamp(v, -1.0f, 1.0f);
  }
  return audio;
}

Audio read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open audio file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode(bytes);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode(const Audio& audio, Encoding encoding) {
  const std::uint16_t bits = encoding == Encoding::kPcm16   ? 16
                             : encoding == Encoding::kPcm24 ? 24
                                                            : 32;
  const std::uint16_t format = encoding == Encoding::kFloat32 ? kFormatFloat : kFormatPcm;
  const std::uint16_t channels = static_cast<std::uint16_t>(audio.channels);
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(audio.interleaved.size() * (bits / 8));

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, format);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(audio.sample_rate) * channels * (bits / 8));
  put_u16(out, static_cast<std::uint16_t>(channels * (bits / 8)));
  put_u16(out, bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);

  for (float sample : audio.interleaved) {
    const double v = std::clamp(static_cast<double>(sample), -1.0, 1.0);
    switch (encoding) {
      case Encoding::kPcm16: {
        const auto q = static_cast<std::int16_t>(std::lround(std::clamp(v * 32768.0, -32768.0, 32767.0)));
        put_u16(out, static_cast<std::uint16_t>(q));
        break;
      }
      case Encoding::kPcm24: {
        const auto q = static_cast<std::int32_t>(std::lround(std::clamp(v * 8388608.0, -8388608.0, 8388607.0)));
        out.push_back(static_cast<std::uint8_t>(q));
        out.push_back(static_cast<std::uint8_t>(q >> 8));
        out.push_back(static_cast<std::uint8_t>(q >> 16));
        break;
      }
      case Encoding::kPcm32: {
        const auto q = static_cast<std::int64_t>(std::llround(std::clamp(v * 2147483648.0, -2147483648.0, 2147483647.0)));
        put_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(q)));
        break;
      }
      case Encoding::kFloat32: {
        std::uint32_t raw;
        const float f = sample;
        std::memcpy(&raw, &f, sizeof(raw));
        put_u32(out, raw);
        break;
      }
    }
  }
  return out;
}

void write(const std::filesystem::path& path, const Audio& audio, Encoding encoding) {
  const auto bytes = encode(audio, encoding);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace groove::wav
