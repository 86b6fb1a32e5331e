#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "groove/corpus.hpp"
#include "groove/probe.hpp"

namespace groove {

// Results file for one (representation, target). Keys sorted, reals rounded
// to 9 significant digits.
nlohmann::json result_to_json(const ProbeResult& result, std::string_view config_hash);
ProbeResult result_from_json(const nlohmann::json& json);
std::string result_file_name(const ProbeResult& result);

struct CellStats {
  double mean = 0.0;
  double std = 0.0;
};

struct SummaryRow {
  std::string label;
  std::string representation;
  std::array<std::optional<CellStats>, 4> cells;  // kAllTargets order
  // Rows excluded from best/second-best marking (the full mix in a stem table).
  bool ranked = true;
};

struct SummaryTable {
  std::string row_header;
  std::vector<SummaryRow> rows;
};

// Rows follow `representation_order`. When every representation is a stem
// of one model the table takes the isolated-instrument layout: stem labels,
// full mix last and unranked.
SummaryTable build_summary(const std::vector<ProbeResult>& results,
                           const std::vector<std::string>& representation_order);

// "0.54 ± 0.03"
std::string format_cell(const CellStats& stats);

// Markdown with **best** and <u>second best</u> per column, ranked on the
// two-decimal means shown. Missing cells print as "n/a".
std::string render_markdown(const SummaryTable& table);
std::string render_csv(const SummaryTable& table, std::string_view config_hash);
nlohmann::json render_json(const SummaryTable& table, std::string_view config_hash);

// Display label for a representation name ("MuQ", "MIR features", "Drums").
std::string representation_label(std::string_view representation_name, bool stem_table);

struct ScatterPoint {
  std::string id;
  double truth = 0.0;
  double prediction = 0.0;
};

// Pairs every rated track with its prediction; throws InputError if one is missing.
std::vector<ScatterPoint> scatter_points(const ProbeResult& result, const Corpus& corpus);
std::string render_scatter_csv(const std::vector<ScatterPoint>& points, std::string_view config_hash);
std::string render_scatter_svg(const std::vector<ScatterPoint>& points, std::string_view target,
                               std::string_view title, std::string_view config_hash);

struct ProjectionRow {
  std::string id;
  std::string style;
  std::vector<double> scores;
  double groove = 0.0;
};

std::string render_projection_csv(const std::vector<ProjectionRow>& rows, std::string_view config_hash);
std::string render_projection_svg(const std::vector<ProjectionRow>& rows, std::string_view title,
                                  std::string_view config_hash);

}  // namespace groove
