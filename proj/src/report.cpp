#include "groove/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "groove/csv.hpp"
#include "groove/embeddings.hpp"
#include "groove/error.hpp"
#include "groove/output.hpp"
#include "groove/prng.hpp"
#include "groove/svg.hpp"

namespace groove {
namespace {

using nlohmann::json;

double r9(double v) { return csv::round_sig9(v); }

std::string two_decimals(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", v);
  std::string s = buffer;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string stem_label(std::string_view stem) {
  if (stem == kFullMix) return "Full audio";
  std::string label(stem);
  label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
  return label;
}

bool is_stem_table(const std::vector<std::string>& order) {
  if (order.empty()) return false;
  std::set<std::string> models;
  bool any_stem = false;
  for (const auto& name : order) {
    const Representation rep = parse_representation(name);
    if (rep.is_mir_features()) return false;
    models.insert(rep.model_name);
    any_stem = any_stem || rep.stem != kFullMix;
  }
  return models.size() == 1 && any_stem;
}

// 1 for best, 2 for second best, 0 otherwise; per column over ranked rows.
std::vector<std::array<int, 4>> rank_cells(const SummaryTable& table) {
  std::vector<std::array<int, 4>> marks(table.rows.size(), std::array<int, 4>{});
  for (std::size_t c = 0; c < 4; ++c) {
    std::set<long, std::greater<>> shown;
    auto key = [](const CellStats& s) { return std::lround(s.mean * 100.0); };
    for (const auto& row : table.rows) {
      if (row.ranked && row.cells[c]) shown.insert(key(*row.cells[c]));
    }
    if (shown.empty()) continue;
    const long best = *shown.begin();
    const long second = shown.size() > 1 ? *std::next(shown.begin()) : best;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto& row = table.rows[r];
      if (!row.ranked || !row.cells[c]) continue;
      const long k = key(*row.cells[c]);
      if (k == best) {
        marks[r][c] = 1;
      } else if (shown.size() > 1 && k == second) {
        marks[r][c] = 2;
      }
    }
  }
  return marks;
}

}  // namespace

nlohmann::json result_to_json(const ProbeResult& result, std::string_view config_hash) {
  json j;
  j["representation"] = result.representation_name;
  j["target"] = std::string(target_name(result.target));
  j["alpha"] = r9(result.alpha);
  j["folds"] = result.folds;
  j["seeds"] = result.seeds;
  json runs = json::array();
  for (double r : result.per_run_r2) runs.push_back(r9(r));
  j["per_run_r2"] = runs;
  j["mean_r2"] = r9(result.mean_r2);
  j["std_r2"] = r9(result.std_r2);
  json predictions = json::object();
  for (const auto& [id, value] : result.predictions) predictions[id] = r9(value);
  j["predictions"] = predictions;
  j["prng_id"] = std::string(kPrngId);
  j["library_version"] = std::string(kToolkitVersion);
  j["config_hash"] = std::string(config_hash);
  return j;
}

ProbeResult result_from_json(const nlohmann::json& j) {
  try {
    ProbeResult result;
    result.representation_name = j.at("representation").get<std::string>();
    result.target = parse_target(j.at("target").get<std::string>());
    result.alpha = j.at("alpha").get<double>();
    result.folds = j.at("folds").get<std::size_t>();
    result.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    result.per_run_r2 = j.at("per_run_r2").get<std::vector<double>>();
    result.mean_r2 = j.at("mean_r2").get<double>();
    result.std_r2 = j.at("std_r2").get<double>();
    for (const auto& [id, value] : j.at("predictions").items()) result.predictions[id] = value.get<double>();
    return result;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed results JSON: ") + e.what());
  }
}

std::string result_file_name(const ProbeResult& result) {
  std::string stem = result.representation_name;
  std::replace(stem.begin(), stem.end(), '/', '_');
  return stem + "__" + std::string(target_name(result.target)) + ".json";
}

std::string representation_label(std::string_view representation_name, bool stem_table) {
  const Representation rep = parse_representation(representation_name);
  if (rep.is_mir_features()) return "MIR features";
  if (stem_table) return stem_label(rep.stem);
  const std::string model = registry_entry(rep.model_name).display_name;
  return rep.stem == kFullMix ? model : model + " (" + rep.stem + ")";
}

SummaryTable build_summary(const std::vector<ProbeResult>& results,
                           const std::vector<std::string>& representation_order) {
  const bool stems = is_stem_table(representation_order);
  SummaryTable table;
  table.row_header = stems ? "Instrument (isolated)" : "Model";
  for (const auto& name : representation_order) {
    SummaryRow row;
    row.representation = name;
    row.label = representation_label(name, stems);
    row.ranked = !(stems && parse_representation(name).stem == kFullMix);
    for (const auto& r : results) {
      if (r.representation_name != name) continue;
      const auto column = static_cast<std::size_t>(
          std::find(kAllTargets.begin(), kAllTargets.end(), r.target) - kAllTargets.begin());
      row.cells[column] = CellStats{r.mean_r2, r.std_r2};
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_cell(const CellStats& stats) {
  return two_decimals(stats.mean) + " ± " + two_decimals(stats.std);
}

std::string render_markdown(const SummaryTable& table) {
  const auto marks = rank_cells(table);
  std::string out = "| " + table.row_header + " |";
  for (Target t : kAllTargets) out += " " + std::string(target_column_label(t)) + " |";
  out += "\n|:--|:-:|:-:|:-:|:-:|\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    out += "| " + row.label + " |";
    for (std::size_t c = 0; c < 4; ++c) {
      std::string cell = row.cells[c] ? format_cell(*row.cells[c]) : "n/a";
      if (marks[r][c] == 1) cell = "**" + cell + "**";
      if (marks[r][c] == 2) cell = "<u>" + cell + "</u>";
      out += " " + cell + " |";
    }
    out += "\n";
  }
  return out;
}

std::string render_csv(const SummaryTable& table, std::string_view config_hash) {
  std::string out = provenance_comment(config_hash) + "\n";
  out += "representation,label";
  for (Target t : kAllTargets) out += "," + std::string(target_column_label(t));
  out += "\n";
  for (const auto& row : table.rows) {
    csv::Row fields = {row.representation, row.label};
    for (const auto& cell : row.cells) fields.push_back(cell ? format_cell(*cell) : "n/a");
    out += csv::join(fields) + "\n";
  }
  return out;
}

nlohmann::json render_json(const SummaryTable& table, std::string_view config_hash) {
  json j;
  j["row_header"] = table.row_header;
  j["library_version"] = std::string(kToolkitVersion);
  j["prng_id"] = std::string(kPrngId);
  j["config_hash"] = std::string(config_hash);
  json rows = json::array();
  for (const auto& row : table.rows) {
    json jr;
    jr["representation"] = row.representation;
    jr["label"] = row.label;
    for (std::size_t c = 0; c < 4; ++c) {
      const std::string key(target_name(kAllTargets[c]));
      if (row.cells[c]) {
        jr[key] = {{"mean_r2", r9(row.cells[c]->mean)}, {"std_r2", r9(row.cells[c]->std)}};
      } else {
        jr[key] = nullptr;
      }
    }
    rows.push_back(jr);
  }
  j["rows"] = rows;
  return j;
}

std::vector<ScatterPoint> scatter_points(const ProbeResult& result, const Corpus& corpus) {
  const std::vector<double> truth = corpus.target_values(result.target);
  std::vector<ScatterPoint> points;
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string& id = corpus.tracks()[i].id;
    const auto it = result.predictions.find(id);
    if (it == result.predictions.end()) {
      missing.push_back(id);
      continue;
    }
    points.push_back({id, truth[i], it->second});
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw InputError("results for " + result.representation_name + " lack predictions for: " + list);
  }
  return points;
}

std::string render_scatter_csv(const std::vector<ScatterPoint>& points, std::string_view config_hash) {
  std::string out = provenance_comment(config_hash) + "\nid,truth,prediction\n";
  for (const auto& p : points) {
    out += csv::join({p.id, csv::format_real(p.truth), csv::format_real(p.prediction)}) + "\n";
  }
  return out;
}

std::string render_scatter_svg(const std::vector<ScatterPoint>& points, std::string_view target,
                               std::string_view title, std::string_view config_hash) {
  svg::ScatterSpec spec;
  spec.title = std::string(title);
  spec.x_label = "ground truth " + std::string(target) + " rating";
  spec.y_label = "predicted " + std::string(target) + " rating";
  spec.identity_line = true;
  spec.comment = provenance_comment(config_hash).substr(2);
  for (const auto& p : points) spec.points.push_back({p.truth, p.prediction, svg::palette_color(0), p.id});
  return svg::render_scatter(spec);
}

std::string render_projection_csv(const std::vector<ProjectionRow>& rows, std::string_view config_hash) {
  std::string out = provenance_comment(config_hash) + "\nid,style";
  const std::size_t c = rows.empty() ? 0 : rows.front().scores.size();
  for (std::size_t i = 0; i < c; ++i) out += ",pc" + std::to_string(i + 1);
  out += ",groove_rating\n";
  for (const auto& row : rows) {
    csv::Row fields = {row.id, row.style};
    for (double s : row.scores) fields.push_back(csv::format_real(s));
    fields.push_back(csv::format_real(row.groove));
    out += csv::join(fields) + "\n";
  }
  return out;
}

std::string render_projection_svg(const std::vector<ProjectionRow>& rows, std::string_view title,
                                  std::string_view config_hash) {
  std::map<std::string, std::size_t> style_index;
  for (const auto& row : rows) style_index.emplace(row.style, 0);
  std::size_t next = 0;
  for (auto& [style, index] : style_index) index = next++;

  svg::ScatterSpec spec;
  spec.title = std::string(title);
  spec.x_label = "PC1";
  spec.y_label = "PC2";
  spec.comment = provenance_comment(config_hash).substr(2);
  for (const auto& row : rows) {
    const double y = row.scores.size() > 1 ? row.scores[1] : 0.0;
    spec.points.push_back({row.scores.at(0), y, svg::palette_color(style_index[row.style]), row.id});
  }
  for (const auto& [style, index] : style_index) {
    spec.legend.push_back({style.empty() ? "(none)" : style, svg::palette_color(index)});
  }
  return svg::render_scatter(spec);
}

}  // namespace groove
