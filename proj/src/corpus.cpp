#include "groove/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "groove/csv.hpp"
#include "groove/error.hpp"
#include "groove/projection.hpp"

namespace groove {
namespace {

constexpr std::array<std::string_view, 12> kManifestColumns = {
    "id",         "title",       "style",      "audio_path", "bass_path", "drums_path",
    "vocals_path", "other_path", "dance",      "listen",     "party",     "groove"};

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::filesystem::path resolve_readable(const std::filesystem::path& base, const std::string& text,
                                       const std::string& where) {
  std::filesystem::path path(text);
  if (path.is_relative()) path = base / path;
  std::ifstream probe(path, std::ios::binary);
  if (!std::filesystem::is_regular_file(path) || !probe) {
    throw InputError(where + ": file not found or unreadable: " + path.string());
  }
  return path;
}

double parse_rating(const std::string& text, std::string_view column, const std::string& where) {
  const double v = csv::parse_double(text, where + " column " + std::string(column));
  if (!(v >= 0.0 && v <= 100.0)) {
    throw InputError(where + ": " + std::string(column) + " = " + text + " outside [0, 100]");
  }
  return v;
}

// Population z-score; a column without spread becomes all zeros.
Eigen::VectorXd zscore(const std::vector<double>& values) {
  const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Eigen::Index>(values.size()));
  const Eigen::VectorXd centered = v.array() - v.mean();
  const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(values.size()));
  if (!(sd > 0.0)) return Eigen::VectorXd::Zero(v.size());
  return centered / sd;
}

}  // namespace

std::string_view target_name(Target target) {
  switch (target) {
    case Target::kGroove: return "groove";
    case Target::kDance: return "dance";
    case Target::kListen: return "listen";
    case Target::kParty: return "party";
  }
  return "groove";
}

Target parse_target(std::string_view name) {
  for (Target t : kAllTargets) {
    if (target_name(t) == name) return t;
  }
  throw InputError("unknown target '" + std::string(name) + "' (expected groove, dance, listen, party)");
}

std::string_view target_column_label(Target target) {
  switch (target) {
    case Target::kGroove: return "R_g";
    case Target::kDance: return "R_d";
    case Target::kListen: return "R_l";
    case Target::kParty: return "R_p";
  }
  return "R_g";
}

Corpus::Corpus(std::vector<Track> tracks, std::vector<RatingSet> ratings) {
  std::set<std::string> track_ids;
  for (const auto& t : tracks) {
    if (!track_ids.insert(t.id).second) throw InputError("duplicate track id '" + t.id + "'");
    if (!t.stem_paths.empty()) {
      bool complete = t.stem_paths.size() == kStemNames.size();
      for (auto stem : kStemNames) complete = complete && t.stem_paths.contains(std::string(stem));
      if (!complete) throw InputError("track '" + t.id + "' must list all four stems or none");
    }
  }
  std::set<std::string> rating_ids;
  for (const auto& r : ratings) {
    if (!rating_ids.insert(r.track_id).second) {
      throw InputError("duplicate ratings for track '" + r.track_id + "'");
    }
    if (!track_ids.contains(r.track_id)) {
      throw InputError("ratings for unknown track '" + r.track_id + "'");
    }
  }
  if (rating_ids.size() != track_ids.size()) {
    for (const auto& id : track_ids) {
      if (!rating_ids.contains(id)) throw InputError("track '" + id + "' has no ratings");
    }
  }
  std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
  std::sort(ratings.begin(), ratings.end(),
            [](const RatingSet& a, const RatingSet& b) { return a.track_id < b.track_id; });
  tracks_ = std::move(tracks);
  ratings_ = std::move(ratings);
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  const auto it = std::lower_bound(tracks_.begin(), tracks_.end(), id,
                                   [](const Track& t, std::string_view key) { return t.id < key; });
  if (it == tracks_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - tracks_.begin());
}

const Track& Corpus::track(std::string_view id) const {
  const auto index = index_of(id);
  if (!index) throw InputError("unknown track '" + std::string(id) + "'");
  return tracks_[*index];
}

const RatingSet& Corpus::rating(std::string_view id) const {
  const auto index = index_of(id);
  if (!index) throw InputError("unknown track '" + std::string(id) + "'");
  return ratings_[*index];
}

std::vector<double> Corpus::target_values(Target target) const {
  std::vector<double> values;
  values.reserve(ratings_.size());
  for (const auto& r : ratings_) {
    switch (target) {
      case Target::kGroove:
        if (!r.groove) throw InputError("track '" + r.track_id + "' has no groove rating");
        values.push_back(*r.groove);
        break;
      case Target::kDance: values.push_back(r.dance); break;
      case Target::kListen: values.push_back(r.listen); break;
      case Target::kParty: values.push_back(r.party); break;
    }
  }
  return values;
}

Corpus load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InputError("manifest not found: " + path.string());
  }
  const csv::Table table = csv::read_file(path);
  std::array<std::size_t, kManifestColumns.size()> column{};
  for (std::size_t c = 0; c < kManifestColumns.size(); ++c) {
    const auto it = std::find_if(table.header.begin(), table.header.end(),
                                 [&](const std::string& h) { return trim(h) == kManifestColumns[c]; });
    if (it == table.header.end()) {
      throw InputError(path.string() + ": header lacks column '" + std::string(kManifestColumns[c]) + "'");
    }
    column[c] = static_cast<std::size_t>(it - table.header.begin());
  }

  const std::filesystem::path base = path.parent_path();
  std::vector<Track> tracks;
  std::vector<RatingSet> ratings;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = path.string() + " row " + std::to_string(table.line_numbers[r]);
    if (row.size() != table.header.size()) {
      throw InputError(where + ": expected " + std::to_string(table.header.size()) + " fields, found " +
                       std::to_string(row.size()));
    }
    auto field = [&](std::size_t c) { return trim(row[column[c]]); };

    Track track;
    track.id = field(0);
    if (track.id.empty()) throw InputError(where + ": empty id");
    if (!seen.insert(track.id).second) throw InputError(where + ": duplicate track id '" + track.id + "'");
    track.title = field(1);
    if (const auto style = field(2); !style.empty()) track.style_label = style;
    if (field(3).empty()) throw InputError(where + ": empty audio_path");
    track.audio_path = resolve_readable(base, field(3), where);

    std::size_t stems_given = 0;
    for (std::size_t s = 0; s < kStemNames.size(); ++s) stems_given += field(4 + s).empty() ? 0 : 1;
    if (stems_given != 0 && stems_given != kStemNames.size()) {
      throw InputError(where + ": stem paths must be all present or all empty");
    }
    if (stems_given != 0) {
      // Column order is bass, drums, vocals, other, matching kStemNames.
      for (std::size_t s = 0; s < kStemNames.size(); ++s) {
        track.stem_paths.emplace(std::string(kStemNames[s]), resolve_readable(base, field(4 + s), where));
      }
    }

    RatingSet rating;
    rating.track_id = track.id;
    rating.dance = parse_rating(field(8), "dance", where);
    rating.listen = parse_rating(field(9), "listen", where);
    rating.party = parse_rating(field(10), "party", where);
    if (const auto g = field(11); !g.empty()) {
      const double v = csv::parse_double(g, where + " column groove");
      if (!(v >= -1.0 && v <= 1.0)) throw InputError(where + ": groove = " + g + " outside [-1, 1]");
      rating.groove = v;
    }
    tracks.push_back(std::move(track));
    ratings.push_back(std::move(rating));
  }
  return Corpus(std::move(tracks), std::move(ratings));
}

std::vector<double> groove_scores(const std::vector<double>& dance, const std::vector<double>& listen,
                                  const std::vector<double>& party) {
  const std::size_t n = dance.size();
  if (listen.size() != n || party.size() != n) {
    throw InputError("rating columns differ in length");
  }
  if (n < 3) {
    throw InputError("groove derivation needs at least 3 tracks, got " + std::to_string(n));
  }
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n), 3);
  z.col(0) = zscore(dance);
  z.col(1) = zscore(listen);
  z.col(2) = zscore(party);
  if (!(z.squaredNorm() > 0.0)) {
    throw NumericalError("dance, listen and party ratings all have zero variance");
  }

  const PcaModel pca = fit_pca(z, 1);
  Eigen::VectorXd scores = project(pca, z).col(0);
  if (scores.dot(z.col(0)) < 0.0) scores = -scores;

  const double lo = scores.minCoeff();
  const double hi = scores.maxCoeff();
  if (!(hi > lo)) throw NumericalError("first principal component scores are constant");
  std::vector<double> groove(n);
  for (std::size_t i = 0; i < n; ++i) {
    groove[i] = std::clamp(2.0 * (scores(static_cast<Eigen::Index>(i)) - lo) / (hi - lo) - 1.0, -1.0, 1.0);
  }
  return groove;
}

Corpus derive_groove_rating(const Corpus& corpus, bool force) {
  const bool all_present = std::all_of(corpus.ratings().begin(), corpus.ratings().end(),
                                       [](const RatingSet& r) { return r.groove.has_value(); });
  if (all_present && !force) return corpus;

  const auto derived = groove_scores(corpus.target_values(Target::kDance),
                                     corpus.target_values(Target::kListen),
                                     corpus.target_values(Target::kParty));
  std::vector<RatingSet> ratings = corpus.ratings();
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (force || !ratings[i].groove) ratings[i].groove = derived[i];
  }
  return Corpus(corpus.tracks(), std::move(ratings));
}

}  // namespace groove
