#include "groove/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include "groove/csv.hpp"
#include "groove/error.hpp"
#include "groove/features.hpp"
#include "groove/output.hpp"
#include "groove/parallel.hpp"

namespace groove {
namespace {

constexpr char kGembMagic[4] = {'G', 'E', 'M', 'B'};
constexpr std::uint8_t kGembVersion = 1;

std::uint32_t le_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

Eigen::MatrixXd read_csv_frames(const std::filesystem::path& path, std::size_t expected_dim,
                                std::string_view model_name) {
  const csv::Table table = csv::read_file(path);
  if (table.header.size() != expected_dim) {
    throw InputError(path.string() + ": dimension mismatch for " + std::string(model_name) + ": file has " +
                     std::to_string(table.header.size()) + " columns, expected " +
                     std::to_string(expected_dim));
  }
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (table.header[j] != "dim_" + std::to_string(j)) {
      throw InputError(path.string() + ": malformed header, column " + std::to_string(j) +
                       " is '" + table.header[j] + "', expected 'dim_" + std::to_string(j) + "'");
    }
  }
  Eigen::MatrixXd frames(static_cast<Eigen::Index>(table.rows.size()),
                         static_cast<Eigen::Index>(expected_dim));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != expected_dim) {
      throw InputError(path.string() + ": row " + std::to_string(r) + " has " +
                       std::to_string(row.size()) + " values, expected " + std::to_string(expected_dim));
    }
    for (std::size_t c = 0; c < expected_dim; ++c) {
      const double v = csv::parse_double(row[c], path.string() + " row " + std::to_string(r) +
                                                     " column " + std::to_string(c));
      if (!std::isfinite(v)) {
        throw InputError(path.string() + ": non-finite value at row " + std::to_string(r) +
                         ", column " + std::to_string(c));
      }
      frames(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return frames;
}

Eigen::MatrixXd read_gemb_frames(const std::filesystem::path& path, std::size_t expected_dim,
                                 std::string_view model_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 13 || std::memcmp(bytes.data(), kGembMagic, 4) != 0) {
    throw InputError(path.string() + ": malformed header (missing GEMB magic)");
  }
  if (bytes[4] != kGembVersion) {
    throw InputError(path.string() + ": unsupported GEMB version " + std::to_string(bytes[4]));
  }
  const std::uint32_t t = le_u32(bytes.data() + 5);
  const std::uint32_t e = le_u32(bytes.data() + 9);
  if (e != expected_dim) {
    throw InputError(path.string() + ": dimension mismatch for " + std::string(model_name) + ": file has " +
                     std::to_string(e) + " columns, expected " + std::to_string(expected_dim));
  }
  const std::size_t payload = static_cast<std::size_t>(t) * e * 4;
  if (bytes.size() != 13 + payload) {
    throw InputError(path.string() + ": expected " + std::to_string(13 + payload) + " bytes, found " +
                     std::to_string(bytes.size()));
  }
  Eigen::MatrixXd frames(t, e);
  const unsigned char* p = bytes.data() + 13;
  for (std::uint32_t r = 0; r < t; ++r) {
    for (std::uint32_t c = 0; c < e; ++c, p += 4) {
      const std::uint32_t raw = le_u32(p);
      float v;
      std::memcpy(&v, &raw, sizeof(v));
      if (!std::isfinite(v)) {
        throw InputError(path.string() + ": non-finite value at row " + std::to_string(r) +
                         ", column " + std::to_string(c));
      }
      frames(r, c) = v;
    }
  }
  return frames;
}

bool is_stem_name(std::string_view stem) {
  return stem == kFullMix || std::find(kStemNames.begin(), kStemNames.end(), stem) != kStemNames.end();
}

DesignMatrix assemble_from_features(const Corpus& corpus, const std::filesystem::path& table_path) {
  if (table_path.empty()) throw InputError("mir_features requires a feature table");
  const csv::Table table = csv::read_file(table_path);
  const auto& names = feature_names();
  if (table.header.size() != kFeatureCount + 1 || table.header[0] != "id" ||
      !std::equal(names.begin(), names.end(), table.header.begin() + 1)) {
    throw InputError(table_path.string() + ": header does not match the 16-feature schema");
  }
  std::map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != kFeatureCount + 1) {
      throw InputError(table_path.string() + " row " + std::to_string(table.line_numbers[r]) +
                       ": expected 17 fields");
    }
    if (!row_of.emplace(table.rows[r][0], r).second) {
      throw InputError(table_path.string() + ": duplicate rows for track '" + table.rows[r][0] + "'");
    }
  }
  DesignMatrix dm;
  dm.representation_name = std::string(kMirFeatures);
  dm.rows.resize(static_cast<Eigen::Index>(corpus.size()), static_cast<Eigen::Index>(kFeatureCount));
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string& id = corpus.tracks()[i].id;
    dm.row_ids.push_back(id);
    const auto it = row_of.find(id);
    if (it == row_of.end()) {
      missing.push_back(id);
      continue;
    }
    const auto& row = table.rows[it->second];
    for (std::size_t c = 0; c < kFeatureCount; ++c) {
      const double v = csv::parse_double(row[c + 1], table_path.string() + " track " + id);
      if (!std::isfinite(v)) throw InputError(table_path.string() + ": non-finite feature for " + id);
      dm.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw InputError("missing representation mir_features for tracks: " + list);
  }
  return dm;
}

}  // namespace

const std::vector<ModelRegistryEntry>& model_registry() {
  static const std::vector<ModelRegistryEntry> registry = {
      {"audiomae", 6144, false, "AudioMAE"}, {"clap", 512, true, "CLAP"},
      {"m2d", 768, false, "M2D"},            {"matpac", 3840, false, "MATPAC++"},
      {"mert", 9984, false, "MERT"},         {"muq", 512, true, "MuQ"},
      {"musicfm", 1024, false, "MusicFM"},
  };
  return registry;
}

const ModelRegistryEntry& registry_entry(std::string_view model_name) {
  for (const auto& entry : model_registry()) {
    if (entry.model_name == model_name) return entry;
  }
  throw InputError("unknown model '" + std::string(model_name) + "'");
}

EmbeddingMatrix read_embedding_file(const std::filesystem::path& path, std::string_view model_name) {
  const ModelRegistryEntry& entry = registry_entry(model_name);
  EmbeddingMatrix matrix;
  matrix.track_id = path.stem().string();
  matrix.model_name = entry.model_name;
  const auto ext = path.extension().string();
  if (ext == ".csv") {
    matrix.frames = read_csv_frames(path, entry.dimension, model_name);
  } else if (ext == ".gemb") {
    matrix.frames = read_gemb_frames(path, entry.dimension, model_name);
  } else {
    throw InputError(path.string() + ": unknown embedding file extension '" + ext + "'");
  }
  if (matrix.frames.rows() < 1) {
    throw InputError(path.string() + ": no frames");
  }
  if (entry.clip_level && matrix.frames.rows() > 1) {
    matrix.warnings.push_back(path.string() + ": clip-level model " + entry.model_name + " file has " +
                              std::to_string(matrix.frames.rows()) + " frames; mean-pooling them");
  }
  return matrix;
}

void write_embedding_csv(const std::filesystem::path& path, const Eigen::MatrixXd& frames) {
  std::string text;
  for (Eigen::Index c = 0; c < frames.cols(); ++c) {
    text += (c ? ",dim_" : "dim_") + std::to_string(c);
  }
  text += '\n';
  for (Eigen::Index r = 0; r < frames.rows(); ++r) {
    for (Eigen::Index c = 0; c < frames.cols(); ++c) {
      if (c) text += ',';
      text += csv::format_real(frames(r, c));
    }
    text += '\n';
  }
  write_file_atomic(path, text);
}

void write_embedding_gemb(const std::filesystem::path& path, const Eigen::MatrixXd& frames) {
  std::string bytes(kGembMagic, 4);
  bytes.push_back(static_cast<char>(kGembVersion));
  auto put = [&bytes](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  };
  put(static_cast<std::uint32_t>(frames.rows()));
  put(static_cast<std::uint32_t>(frames.cols()));
  for (Eigen::Index r = 0; r < frames.rows(); ++r) {
    for (Eigen::Index c = 0; c < frames.cols(); ++c) {
      const auto f = static_cast<float>(frames(r, c));
      std::uint32_t raw;
      std::memcpy(&raw, &f, sizeof(raw));
      put(raw);
    }
  }
  write_file_atomic(path, bytes);
}

Eigen::VectorXd pool_embedding(const EmbeddingMatrix& matrix) {
  if (matrix.frames.rows() == 1) return matrix.frames.row(0).transpose();
  return matrix.frames.colwise().mean().transpose();
}

std::string Representation::name() const {
  if (is_mir_features() || stem == kFullMix) return model_name;
  return model_name + "/" + stem;
}

Representation parse_representation(std::string_view text) {
  Representation rep;
  const auto slash = text.find('/');
  rep.model_name = std::string(text.substr(0, slash));
  if (slash != std::string_view::npos) rep.stem = std::string(text.substr(slash + 1));
  if (rep.is_mir_features()) {
    if (slash != std::string_view::npos) throw InputError("mir_features takes no stem qualifier");
    return rep;
  }
  registry_entry(rep.model_name);
  if (!is_stem_name(rep.stem)) {
    throw InputError("unknown stem '" + rep.stem + "' (expected full, bass, drums, vocals, other)");
  }
  return rep;
}

DesignMatrix assemble_design_matrix(const Corpus& corpus, const Representation& representation,
                                    const RepresentationSources& sources) {
  if (representation.is_mir_features()) {
    return assemble_from_features(corpus, sources.feature_table);
  }
  const ModelRegistryEntry& entry = registry_entry(representation.model_name);
  const std::filesystem::path dir = sources.embedding_root / entry.model_name / representation.stem;

  const std::size_t n = corpus.size();
  std::vector<std::filesystem::path> files(n);
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = corpus.tracks()[i].id;
    const auto csv_path = dir / (id + ".csv");
    const auto gemb_path = dir / (id + ".gemb");
    const bool has_csv = std::filesystem::is_regular_file(csv_path);
    const bool has_gemb = std::filesystem::is_regular_file(gemb_path);
    if (has_csv && has_gemb) {
      throw InputError("duplicate embedding files for track '" + id + "' in " + dir.string());
    }
    if (!has_csv && !has_gemb) {
      missing.push_back(id);
    } else {
      files[i] = has_csv ? csv_path : gemb_path;
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw InputError("missing representation " + representation.name() + " in " + dir.string() +
                     " for tracks: " + list);
  }

  std::vector<EmbeddingMatrix> matrices(n);
  parallel_for(n, default_thread_count(),
               [&](std::size_t i) { matrices[i] = read_embedding_file(files[i], entry.model_name); });

  DesignMatrix dm;
  dm.representation_name = representation.name();
  dm.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(entry.dimension));
  for (std::size_t i = 0; i < n; ++i) {
    dm.row_ids.push_back(corpus.tracks()[i].id);
    dm.rows.row(static_cast<Eigen::Index>(i)) = pool_embedding(matrices[i]).transpose();
    dm.warnings.insert(dm.warnings.end(), matrices[i].warnings.begin(), matrices[i].warnings.end());
  }
  return dm;
}

}  // namespace groove
