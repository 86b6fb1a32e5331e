#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace groove {

inline constexpr std::array<std::string_view, 4> kStemNames = {"bass", "drums", "vocals",
                                                               "other"};

struct Track {
  std::string id;
  std::string title;
  std::optional<std::string> style_label;
  std::filesystem::path audio_path;
  // Empty, or exactly the four entries of kStemNames.
  std::map<std::string, std::filesystem::path> stem_paths;
};

struct RatingSet {
  std::string track_id;
  double dance = 0.0;
  double listen = 0.0;
  double party = 0.0;
  std::optional<double> groove;
};

enum class Target { kGroove, kDance, kListen, kParty };

inline constexpr std::array<Target, 4> kAllTargets = {Target::kGroove, Target::kDance,
                                                      Target::kListen, Target::kParty};

std::string_view target_name(Target target);
// "groove" | "dance" | "listen" | "party"; throws InputError otherwise.
Target parse_target(std::string_view name);
// Column label used in summary tables ("R_g", "R_d", ...).
std::string_view target_column_label(Target target);

// Tracks and their ratings, kept sorted by ascending track id. Each track has
// exactly one RatingSet at the same index.
class Corpus {
 public:
  Corpus() = default;
  // Validates uniqueness of ids and the tracks/ratings bijection, then sorts.
  Corpus(std::vector<Track> tracks, std::vector<RatingSet> ratings);

  const std::vector<Track>& tracks() const { return tracks_; }
  const std::vector<RatingSet>& ratings() const { return ratings_; }
  std::size_t size() const { return tracks_.size(); }

  const Track& track(std::string_view id) const;
  const RatingSet& rating(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  // Target values in track order. Groove must have been set (from the
  // manifest or by derive_groove_rating).
  std::vector<double> target_values(Target target) const;

 private:
  std::vector<Track> tracks_;
  std::vector<RatingSet> ratings_;
};

// Parses the manifest CSV. Relative paths resolve against the manifest's
// directory. Every referenced audio file must exist.
Corpus load_manifest(const std::filesystem::path& path);

// Sets RatingSet::groove to the first principal component score of the
// z-scored (dance, listen, party) columns, oriented to correlate
// non-negatively with dance and min-max rescaled to [-1, 1]. Ratings that
// already carry a groove value keep it unless `force` is set; derivation is
// skipped entirely when every track already has one.
Corpus derive_groove_rating(const Corpus& corpus, bool force = false);

// The derivation itself on raw columns, exposed for testing. Returns one
// value per row.
std::vector<double> groove_scores(const std::vector<double>& dance,
                                  const std::vector<double>& listen,
                                  const std::vector<double>& party);

}  // namespace groove
