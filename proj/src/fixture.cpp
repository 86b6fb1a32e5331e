#include "groove/fixture.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "groove/corpus.hpp"
#include "groove/csv.hpp"
#include "groove/embeddings.hpp"
#include "groove/output.hpp"
#include "groove/prng.hpp"
#include "groove/wav.hpp"

namespace groove {
namespace {

constexpr std::size_t kEmbeddingDim = 512;

double gaussian(SplitMix64& rng) {
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u = 1.0 - rng.uniform();
  const double v = rng.uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

Eigen::VectorXd gaussian_vector(SplitMix64& rng, std::size_t dim) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gaussian(rng);
  return v;
}

// Click track: 20 ms decaying 1 kHz bursts at `bpm`, over a quiet noise bed.
wav::Audio click_track(double bpm, double seconds, int rate, int channels, double gain, SplitMix64& rng) {
  const auto n = static_cast<std::size_t>(seconds * rate);
  std::vector<double> mono(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) mono[i] = 0.01 * gaussian(rng);
  const double period = 60.0 / bpm;
  const auto burst = static_cast<std::size_t>(0.02 * rate);
  for (double t = 0.25; t < seconds; t += period) {
    const auto start = static_cast<std::size_t>(t * rate);
    for (std::size_t k = 0; k < burst && start + k < n; ++k) {
      const double time = static_cast<double>(k) / rate;
      mono[start + k] += gain * std::exp(-time / 0.005) * std::sin(2.0 * std::numbers::pi * 1000.0 * time);
    }
  }
  wav::Audio audio;
  audio.sample_rate = rate;
  audio.channels = channels;
  audio.interleaved.reserve(n * static_cast<std::size_t>(channels));
  for (double s : mono) {
    for (int c = 0; c < channels; ++c) audio.interleaved.push_back(static_cast<float>(std::clamp(s, -1.0, 1.0)));
  }
  return audio;
}

std::string fixture_id(std::size_t index) {
  std::string digits = std::to_string(index + 1);
  if (digits.size() < 2) digits.insert(0, "0");
  return "trk" + digits;
}

std::string style_for(double latent) {
  if (latent < -0.33) return "rock";
  if (latent < 0.33) return "pop";
  return "funk";
}

}  // namespace

FixturePaths write_synthetic_fixture(const std::filesystem::path& root, const FixtureOptions& options) {
  FixturePaths paths{root, root / "manifest.csv", root / "embeddings"};
  std::filesystem::create_directories(root / "audio");
  SplitMix64 rng(options.seed);

  // Latent scores spread evenly over [-1, 1] then shuffled, so every fold
  // sees a range of ratings.
  std::vector<std::size_t> order(options.tracks);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);
  std::vector<double> latent(options.tracks);
  for (std::size_t i = 0; i < options.tracks; ++i) {
    latent[i] = options.tracks > 1 ? -1.0 + 2.0 * static_cast<double>(order[i]) / static_cast<double>(options.tracks - 1) : 0.0;
  }

  std::string manifest = "id,title,style,audio_path,bass_path,drums_path,vocals_path,other_path,dance,listen,party,groove\n";
  static constexpr int kRates[] = {44100, 22050, 48000};
  for (std::size_t i = 0; i < options.tracks; ++i) {
    const std::string id = fixture_id(i);
    const double z = latent[i];
    const int rate = kRates[i % 3];
    const int channels = i % 2 == 0 ? 1 : 2;
    const wav::Audio audio = click_track(90.0 + 30.0 * (z + 1.0), options.seconds, rate, channels, 0.3 + 0.2 * (z + 1.0), rng);
    wav::write(root / "audio" / (id + ".wav"), audio, rate == 48000 ? wav::Encoding::kFloat32 : wav::Encoding::kPcm16);

    const double dance = 50.0 + 35.0 * z;
    const double listen = 45.0 + 20.0 * z;
    const double party = 55.0 + 30.0 * z;
    manifest += csv::join({id, "Synthetic " + id, style_for(z), "audio/" + id + ".wav", "", "", "", "",
                           csv::format_real(dance), csv::format_real(listen), csv::format_real(party), ""}) +
                "\n";
  }
  write_file_atomic(paths.manifest, manifest);

  // Planted representation: each stem lies on its own line through the
  // latent score with a little isotropic jitter.
  for (std::string_view stem : {"full", "bass", "drums", "vocals", "other"}) {
    const Eigen::VectorXd direction = gaussian_vector(rng, kEmbeddingDim);
    const Eigen::VectorXd offset = gaussian_vector(rng, kEmbeddingDim);
    for (std::size_t i = 0; i < options.tracks; ++i) {
      const Eigen::VectorXd v = offset + latent[i] * direction + 0.01 * gaussian_vector(rng, kEmbeddingDim);
      write_embedding_csv(paths.embedding_root / "muq" / std::string(stem) / (fixture_id(i) + ".csv"),
                          v.transpose());
    }
  }
  // Noise representation, independent of the ratings.
  for (std::size_t i = 0; i < options.tracks; ++i) {
    write_embedding_gemb(paths.embedding_root / "clap" / "full" / (fixture_id(i) + ".gemb"),
                         gaussian_vector(rng, kEmbeddingDim).transpose());
  }
  return paths;
}

}  // namespace groove
