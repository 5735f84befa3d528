#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aerostp/sweep.hpp"

namespace aerostp {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to the same double ("nan",
/// "inf", "-inf" for non-finite values).
std::string format_double(double value);

/// Strict inverse of format_double; the whole string must be consumed.
double parse_double(std::string_view text);

// --- CSV -------------------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;  // throws if absent
  bool has_column(std::string_view name) const;
};

/// RFC 4180 reader. Rejects a missing header and rows whose column count
/// differs from the header's.
CsvTable read_csv(std::istream& in);
void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);

/// Sweep CSV columns, in order:
///   one column per axis (named after the parameter),
///   stp_analytic, stp_mc, stp_mc_stderr,
///   stp_analytic_err, mc_trials, mc_empty_windows,
///   engines ("analytic", "mc" or "analytic+mc": what ran at the point),
///   assoc_<class> per link class and assoc_err (only when the association
///   was recorded),
///   error.
/// Cells of engines that did not run are empty.
std::vector<std::string> sweep_csv_header(const SweepResult& result);
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Rebuilds the points of a sweep CSV. Axis values come from `axes` when
/// given; otherwise they are inferred from the rows (for 2-D sweeps the
/// second axis is the fastest-varying one).
SweepResult read_sweep_csv(std::istream& in,
                           const std::optional<std::vector<GridSpec>>& axes = std::nullopt);

// --- JSON ------------------------------------------------------------------

Json to_json(const NetworkSpec& network);
Json to_json(const SimConfig& sim);
Json to_json(const AnalysisOptions& options);
Json to_json(const GridSpec& grid);
Json to_json(const AssociationTable& table);
Json to_json(const Estimate& estimate);
Json to_json(const SweepMetadata& metadata, const std::vector<GridSpec>& axes);

/// Provenance record written next to every output file.
struct RunManifest {
  std::string config_path;
  std::string config_sha256;
  std::string config_text;
  std::vector<std::string> command_line;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;
  std::string engine_version;
  std::string timestamp;
  Json extra = Json::object();  // command-specific metadata
};

Json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const Json& json);

/// "<output>.manifest.json"
std::string manifest_path(const std::string& output_path);

std::string sha256_hex(std::string_view data);

/// Writes `content` to `path`, replacing any existing file.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace aerostp
