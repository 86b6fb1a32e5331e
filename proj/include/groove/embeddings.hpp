#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "groove/corpus.hpp"

namespace groove {

struct ModelRegistryEntry {
  std::string model_name;
  std::size_t dimension = 0;
  bool clip_level = false;
  std::string display_name;
};

// Fixed table of supported models. Immutable.
const std::vector<ModelRegistryEntry>& model_registry();
// Throws InputError for unknown names.
const ModelRegistryEntry& registry_entry(std::string_view model_name);

struct EmbeddingMatrix {
  std::string track_id;
  std::string model_name;
  Eigen::MatrixXd frames;  // T x e
  std::vector<std::string> warnings;
};

// Reads a .csv or .gemb interchange file and checks its width against the
// registry. The track id is the file stem.
EmbeddingMatrix read_embedding_file(const std::filesystem::path& path, std::string_view model_name);

// Writers for the same formats, used by fixtures and tests.
void write_embedding_csv(const std::filesystem::path& path, const Eigen::MatrixXd& frames);
void write_embedding_gemb(const std::filesystem::path& path, const Eigen::MatrixXd& frames);

// Column-wise mean over frames.
Eigen::VectorXd pool_embedding(const EmbeddingMatrix& matrix);

inline constexpr std::string_view kMirFeatures = "mir_features";
inline constexpr std::string_view kFullMix = "full";

// One representation to probe: a model, optionally restricted to a stem, or
// the handcrafted feature table.
struct Representation {
  std::string model_name;  // registry name or kMirFeatures
  std::string stem = std::string(kFullMix);

  bool is_mir_features() const { return model_name == kMirFeatures; }
  // "muq", "muq/drums" or "mir_features".
  std::string name() const;
};

// Parses "muq", "muq/drums", "muq/full" or "mir_features".
Representation parse_representation(std::string_view text);

struct DesignMatrix {
  std::string representation_name;
  std::vector<std::string> row_ids;  // ascending track id
  Eigen::MatrixXd rows;              // n x e
  std::vector<std::string> warnings;
};

struct RepresentationSources {
  std::filesystem::path embedding_root;  // <root>/<model>/<stem_or_full>/<id>.csv|.gemb
  std::filesystem::path feature_table;   // for mir_features
};

// One pooled row per corpus track, ordered by ascending track id.
DesignMatrix assemble_design_matrix(const Corpus& corpus, const Representation& representation,
                                    const RepresentationSources& sources);

}  // namespace groove
