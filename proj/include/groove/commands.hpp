#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "groove/corpus.hpp"
#include "groove/embeddings.hpp"
#include "groove/probe.hpp"

namespace groove {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitNumerical = 2 };

struct RunSpec {
  std::filesystem::path manifest;
  std::filesystem::path embedding_root;
  std::filesystem::path feature_table;
  std::vector<std::string> representations;
  std::vector<Target> targets;
  ProbeConfig probe;
  std::filesystem::path out;

  // At least one representation and target; output directory creatable.
  void validate() const;
  // FNV-1a over a canonical rendering of every field that affects results.
  std::string config_hash() const;
};

struct FeaturesOptions {
  std::filesystem::path manifest;
  std::filesystem::path out;  // CSV file
  double sample_rate = 44100.0;
  bool keep_going = false;
  std::size_t threads = 0;
};

struct ProbeOptions {
  RunSpec spec;
  std::vector<std::string> formats = {"md", "csv"};
};

struct ScatterOptions {
  std::filesystem::path results;
  std::filesystem::path manifest;
  std::filesystem::path out;  // directory
};

struct PcaOptions {
  std::filesystem::path manifest;
  std::filesystem::path embedding_root;
  std::filesystem::path feature_table;
  std::vector<std::string> representations;
  std::size_t components = 2;
  bool standardize = false;
  bool svg = false;
  std::filesystem::path out;
};

// Each returns an ExitCode and reports problems on `err`.
int cmd_features(const FeaturesOptions& options, std::ostream& out, std::ostream& err);
int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err);
int cmd_scatter(const ScatterOptions& options, std::ostream& out, std::ostream& err);
int cmd_pca(const PcaOptions& options, std::ostream& out, std::ostream& err);

// Full command line entry point (argv[0] included).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace groove
