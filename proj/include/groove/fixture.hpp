#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace groove {

struct FixtureOptions {
  std::size_t tracks = 12;
  double seconds = 6.0;
  std::uint64_t seed = 7;
};

struct FixturePaths {
  std::filesystem::path root;
  std::filesystem::path manifest;
  std::filesystem::path embedding_root;
};

// Writes a self-contained synthetic corpus under `root`:
//   audio/<id>.wav    click tracks whose tempo and density follow a latent score
//   manifest.csv      ratings linear in the same latent score (groove left empty)
//   embeddings/muq/{full,bass,drums,vocals,other}/<id>.csv
//                     512-d vectors on a line through the latent score
//   embeddings/clap/full/<id>.gemb
//                     512-d noise independent of the ratings
// Output depends only on the options.
FixturePaths write_synthetic_fixture(const std::filesystem::path& root,
                                     const FixtureOptions& options = {});

}  // namespace groove
