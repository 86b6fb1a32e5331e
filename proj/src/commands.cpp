#include "groove/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "groove/csv.hpp"
#include "groove/error.hpp"
#include "groove/features.hpp"
#include "groove/fixture.hpp"
#include "groove/output.hpp"
#include "groove/parallel.hpp"
#include "groove/projection.hpp"
#include "groove/report.hpp"

namespace groove {
namespace {

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) items.push_back(current);
      current.clear();
    } else if (c != ' ') {
      current.push_back(c);
    }
  }
  if (!current.empty()) items.push_back(current);
  return items;
}

std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size() || item.front() == '-') throw std::invalid_argument(item);
      seeds.push_back(v);
    } catch (const std::exception&) {
      throw InputError("invalid seed '" + item + "'");
    }
  }
  return seeds;
}

// Applies --stems to bare model names; explicit "model/stem" and mir_features
// pass through unchanged.
std::vector<std::string> expand_representations(const std::vector<std::string>& names,
                                                const std::vector<std::string>& stems) {
  std::vector<std::string> out;
  for (const auto& name : names) {
    const Representation rep = parse_representation(name);
    if (rep.is_mir_features() || stems.empty() || name.find('/') != std::string::npos) {
      out.push_back(rep.name());
      continue;
    }
    for (const auto& stem : stems) out.push_back(parse_representation(rep.model_name + "/" + stem).name());
  }
  return out;
}

std::string file_stem_for(std::string_view representation) {
  std::string s(representation);
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

// Runs `body`, mapping exceptions to exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

std::string features_config_hash(double sample_rate) {
  const FeatureConfig c;
  std::ostringstream canon;
  canon << "features;sample_rate=" << csv::format_real(sample_rate) << ";frame=" << csv::format_real(c.frame_seconds)
        << ";hop=" << csv::format_real(c.hop_fraction) << ";bpm=" << csv::format_real(c.min_bpm) << "-"
        << csv::format_real(c.max_bpm) << ";event_k=" << csv::format_real(c.event_threshold_k)
        << ";event_window=" << csv::format_real(c.event_window_seconds);
  return hex64(fnv1a64(canon.str()));
}

}  // namespace

void RunSpec::validate() const {
  if (representations.empty()) throw InputError("at least one representation is required");
  if (targets.empty()) throw InputError("at least one target is required");
  for (const auto& r : representations) parse_representation(r);
  probe.validate();
  if (out.empty()) throw InputError("an output directory is required");
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec || !std::filesystem::is_directory(out)) {
    throw InputError("output directory not writable: " + out.string());
  }
}

std::string RunSpec::config_hash() const {
  std::ostringstream canon;
  canon << "probe;alpha=" << csv::format_real(probe.alpha) << ";folds=" << probe.folds << ";seeds=";
  for (auto s : probe.seeds) canon << s << ",";
  canon << ";standardize=" << probe.standardize << ";targets=";
  for (auto t : targets) canon << target_name(t) << ",";
  canon << ";representations=";
  for (const auto& r : representations) canon << r << ",";
  return hex64(fnv1a64(canon.str()));
}

int cmd_features(const FeaturesOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Corpus corpus = load_manifest(options.manifest);
    const std::size_t n = corpus.size();
    std::vector<std::optional<FeatureVector>> vectors(n);
    std::vector<std::string> failures(n);
    const std::size_t threads = options.threads ? options.threads : default_thread_count();
    parallel_for(n, threads, [&](std::size_t i) {
      try {
        vectors[i] = extract_feature_vector(corpus.tracks()[i], options.sample_rate);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    });

    std::size_t failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!failures[i].empty()) {
        err << "track " << corpus.tracks()[i].id << ": " << failures[i] << "\n";
        ++failed;
      }
    }
    if (failed > 0 && !options.keep_going) {
      err << failed << " of " << n << " tracks failed; no output written (use --keep-going)\n";
      return static_cast<int>(kExitInput);
    }

    std::string text = provenance_comment(features_config_hash(options.sample_rate)) + "\nid";
    for (auto name : feature_names()) text += "," + std::string(name);
    text += "\n";
    for (const auto& fv : vectors) {
      if (!fv) continue;
      csv::Row row = {fv->track_id};
      for (double v : fv->values) row.push_back(csv::format_real(v));
      text += csv::join(row) + "\n";
    }
    const auto path = options.out / "features.csv";
    write_file_atomic(path, text);
    out << "wrote " << path.string() << " (" << (n - failed) << " tracks)\n";
    return failed > 0 ? static_cast<int>(kExitInput) : static_cast<int>(kExitOk);
  });
}

int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunSpec& spec = options.spec;
    spec.validate();
    for (const auto& f : options.formats) {
      if (f != "md" && f != "csv" && f != "json") throw InputError("unknown format '" + f + "'");
    }
    Corpus corpus = load_manifest(spec.manifest);
    if (std::find(spec.targets.begin(), spec.targets.end(), Target::kGroove) != spec.targets.end()) {
      corpus = derive_groove_rating(corpus);
    }
    const std::string hash = spec.config_hash();

    std::vector<ProbeResult> results;
    int status = kExitOk;
    auto note_failure = [&](int code) { status = std::max(status, code); };

    for (const auto& name : spec.representations) {
      DesignMatrix X;
      const int assembled = guarded(err, [&] {
        X = assemble_design_matrix(corpus, parse_representation(name), {spec.embedding_root, spec.feature_table});
        return static_cast<int>(kExitOk);
      });
      if (assembled != kExitOk) {
        note_failure(assembled);
        continue;
      }
      for (const auto& w : X.warnings) err << "warning: " << w << "\n";
      for (Target target : spec.targets) {
        const int fitted = guarded(err, [&] {
          ProbeConfig config = spec.probe;
          config.target = target;
          ProbeResult result = run_cv(X, target_vector(corpus, X, target), config);
          const std::string body = result_to_json(result, hash).dump(2) + "\n";
          write_file_atomic(spec.out / "results" / result_file_name(result), body);
          results.push_back(std::move(result));
          return static_cast<int>(kExitOk);
        });
        note_failure(fitted);
      }
    }

    SummaryTable table = build_summary(results, spec.representations);
    // Only the requested target columns are populated; the layout keeps all four.
    const std::string md = "<!-- " + provenance_comment(hash).substr(2) + " -->\n" + render_markdown(table);
    for (const auto& f : options.formats) {
      if (f == "md") write_file_atomic(spec.out / "summary.md", md);
      if (f == "csv") write_file_atomic(spec.out / "summary.csv", render_csv(table, hash));
      if (f == "json") write_file_atomic(spec.out / "summary.json", render_json(table, hash).dump(2) + "\n");
    }
    out << render_markdown(table);
    return status;
  });
}

int cmd_scatter(const ScatterOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text_file(options.results));
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(options.results.string() + ": " + e.what());
    }
    const ProbeResult result = result_from_json(j);
    const std::string hash = j.value("config_hash", std::string("0000000000000000"));
    Corpus corpus = load_manifest(options.manifest);
    if (result.target == Target::kGroove) corpus = derive_groove_rating(corpus);

    const auto points = scatter_points(result, corpus);
    const std::string stem = "scatter_" + options.results.stem().string();
    const std::string target(target_name(result.target));
    const std::string title = representation_label(result.representation_name, false) + ": " + target;
    write_file_atomic(options.out / (stem + ".csv"), render_scatter_csv(points, hash));
    write_file_atomic(options.out / (stem + ".svg"), render_scatter_svg(points, target, title, hash));
    out << "wrote " << (options.out / (stem + ".csv")).string() << " and .svg\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_pca(const PcaOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.representations.empty()) throw InputError("at least one representation is required");
    for (const auto& r : options.representations) parse_representation(r);
    Corpus corpus = load_manifest(options.manifest);
    if (options.components < 1 || options.components + 1 > corpus.size()) {
      throw InputError("--components must lie in [1, n-1] = [1, " + std::to_string(corpus.size() - 1) + "]");
    }
    corpus = derive_groove_rating(corpus);

    std::ostringstream canon;
    canon << "pca;components=" << options.components << ";standardize=" << options.standardize << ";representations=";
    for (const auto& r : options.representations) canon << r << ",";
    const std::string hash = hex64(fnv1a64(canon.str()));

    for (const auto& name : options.representations) {
      const DesignMatrix X =
          assemble_design_matrix(corpus, parse_representation(name), {options.embedding_root, options.feature_table});
      for (const auto& w : X.warnings) err << "warning: " << w << "\n";
      if (options.components > static_cast<std::size_t>(X.rows.cols())) {
        throw InputError("--components exceeds the " + std::to_string(X.rows.cols()) + " dimensions of " + name);
      }
      const PcaModel model = fit_pca(X.rows, options.components, options.standardize);
      const Eigen::MatrixXd scores = project(model, X.rows);

      std::vector<ProjectionRow> rows;
      for (std::size_t i = 0; i < X.row_ids.size(); ++i) {
        const Track& track = corpus.track(X.row_ids[i]);
        ProjectionRow row;
        row.id = track.id;
        row.style = track.style_label.value_or("");
        for (Eigen::Index c = 0; c < scores.cols(); ++c) row.scores.push_back(scores(static_cast<Eigen::Index>(i), c));
        row.groove = *corpus.rating(track.id).groove;
        rows.push_back(std::move(row));
      }
      const std::string stem = "pca_" + file_stem_for(name);
      write_file_atomic(options.out / (stem + ".csv"), render_projection_csv(rows, hash));
      if (options.svg) {
        write_file_atomic(options.out / (stem + ".svg"),
                          render_projection_svg(rows, representation_label(name, false) + " PCA", hash));
      }
      out << name << ": explained variance";
      for (Eigen::Index c = 0; c < model.explained_variance_ratio.size(); ++c) {
        out << " " << csv::format_real(model.explained_variance_ratio(c));
      }
      out << "\n";
    }
    return static_cast<int>(kExitOk);
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear probing of audio representations for groove ratings", "groove-probe"};
  app.set_config("--config", "", "TOML/INI file whose keys mirror the long flags; flags on the command line win");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolkitVersion));

  // features
  FeaturesOptions feat;
  std::string feat_out;
  auto* features = app.add_subcommand("features", "Compute the 16 handcrafted features for every track");
  features->add_option("--manifest", feat.manifest, "Track manifest CSV")->required();
  features->add_option("--out", feat_out, "Output directory (features.csv)")->required();
  features->add_option("--sample-rate", feat.sample_rate, "Analysis sample rate in Hz")->capture_default_str();
  features->add_flag("--keep-going", feat.keep_going, "Write rows for tracks that succeed even if others fail");

  // probe
  ProbeOptions probe_opts;
  std::string reps, stems, targets = "groove,dance,listen,party", seeds = "0,1,2,3,4", formats = "md,csv";
  std::string manifest, emb_root, feature_table, probe_out;
  bool standardize = true;
  auto* probe = app.add_subcommand("probe", "Cross-validated ridge probes and summary tables");
  probe->add_option("--manifest", manifest, "Track manifest CSV")->required();
  probe->add_option("--emb-root", emb_root, "Embedding root directory");
  probe->add_option("--features", feature_table, "Feature table CSV for mir_features");
  probe->add_option("--representations", reps, "Comma list: model, model/stem or mir_features")->required();
  probe->add_option("--stems", stems, "Comma list of stems applied to bare model names");
  probe->add_option("--targets", targets, "Comma list of groove, dance, listen, party")->capture_default_str();
  probe->add_option("--alpha", probe_opts.spec.probe.alpha, "Ridge penalty")->capture_default_str();
  probe->add_option("--folds", probe_opts.spec.probe.folds, "Cross-validation folds")->capture_default_str();
  probe->add_option("--seeds", seeds, "Comma list of run seeds")->capture_default_str();
  probe->add_flag("--standardize,!--no-standardize", standardize, "z-score features with training statistics");
  probe->add_option("--out", probe_out, "Output directory")->required();
  probe->add_option("--format", formats, "Summary formats: md, csv, json")->capture_default_str();

  // scatter
  ScatterOptions scatter_opts;
  auto* scatter = app.add_subcommand("scatter", "Predicted vs. ground-truth scatter data and SVG");
  scatter->add_option("--results", scatter_opts.results, "Results JSON from probe")->required();
  scatter->add_option("--manifest", scatter_opts.manifest, "Track manifest CSV")->required();
  scatter->add_option("--out", scatter_opts.out, "Output directory")->required();

  // pca
  PcaOptions pca_opts;
  std::string pca_reps, pca_stems;
  auto* pca = app.add_subcommand("pca", "Project representations on their leading principal components");
  pca->add_option("--manifest", pca_opts.manifest, "Track manifest CSV")->required();
  pca->add_option("--emb-root", pca_opts.embedding_root, "Embedding root directory");
  pca->add_option("--features", pca_opts.feature_table, "Feature table CSV for mir_features");
  pca->add_option("--representations", pca_reps, "Comma list of representations")->required();
  pca->add_option("--stems", pca_stems, "Comma list of stems applied to bare model names");
  pca->add_option("--components", pca_opts.components, "Number of components")->capture_default_str();
  pca->add_flag("--standardize,!--no-standardize", pca_opts.standardize, "Scale columns to unit variance");
  pca->add_flag("--svg", pca_opts.svg, "Also write an SVG per representation");
  pca->add_option("--out", pca_opts.out, "Output directory")->required();

  // synthetic fixture
  FixtureOptions fixture_opts;
  std::string fixture_out;
  auto* fixture = app.add_subcommand("synth-fixture", "Write the synthetic demo corpus");
  fixture->add_option("--out", fixture_out, "Output directory")->required();
  fixture->add_option("--tracks", fixture_opts.tracks, "Number of tracks")->capture_default_str();
  fixture->add_option("--seed", fixture_opts.seed, "Generator seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitInput);
  }

  if (*features) {
    feat.out = feat_out;
    return cmd_features(feat, out, err);
  }
  if (*probe) {
    return guarded(err, [&] {
      RunSpec& spec = probe_opts.spec;
      spec.manifest = manifest;
      spec.embedding_root = emb_root;
      spec.feature_table = feature_table;
      spec.representations = expand_representations(split_list(reps), split_list(stems));
      for (const auto& t : split_list(targets)) spec.targets.push_back(parse_target(t));
      spec.probe.seeds = parse_seeds(seeds);
      spec.probe.standardize = standardize;
      spec.out = probe_out;
      probe_opts.formats = split_list(formats);
      return cmd_probe(probe_opts, out, err);
    });
  }
  if (*scatter) return cmd_scatter(scatter_opts, out, err);
  if (*pca) {
    return guarded(err, [&] {
      pca_opts.representations = expand_representations(split_list(pca_reps), split_list(pca_stems));
      return cmd_pca(pca_opts, out, err);
    });
  }
  return guarded(err, [&] {
    const FixturePaths paths = write_synthetic_fixture(fixture_out, fixture_opts);
    out << "manifest: " << paths.manifest.string() << "\nembeddings: " << paths.embedding_root.string() << "\n";
    return static_cast<int>(kExitOk);
  });
}

}  // namespace groove
