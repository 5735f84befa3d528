#include "aerostp/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "aerostp/errors.hpp"

namespace aerostp {

namespace {

constexpr std::string_view kAssocPrefix = "assoc_";

LinkClass parse_link_class(std::string_view text) {
  // "layer<k>_<los|nlos>"
  constexpr std::string_view prefix = "layer";
  const auto us = text.rfind('_');
  if (text.substr(0, prefix.size()) != prefix || us == std::string_view::npos) {
    throw ValidationError("bad link class '" + std::string(text) + "'");
  }
  std::size_t k = 0;
  const auto digits = text.substr(prefix.size(), us - prefix.size());
  const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
  if (ec != std::errc() || p != digits.data() + digits.size() || k < 1) {
    throw ValidationError("bad link class '" + std::string(text) + "'");
  }
  const auto env = text.substr(us + 1);
  if (env == "los") return {k - 1, Environment::kLos};
  if (env == "nlos") return {k - 1, Environment::kNlos};
  throw ValidationError("bad link class '" + std::string(text) + "'");
}

std::string engines_cell(const SweepPoint& p) {
  if (p.ran_analytic && p.ran_montecarlo) return "analytic+mc";
  if (p.ran_analytic) return "analytic";
  if (p.ran_montecarlo) return "mc";
  return "";
}

std::string opt_double(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::optional<double> cell_double(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return parse_double(cell);
}

std::uint64_t cell_count(const std::string& cell) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || p != cell.data() + cell.size()) {
    throw ValidationError("not a count: '" + cell + "'");
  }
  return v;
}

std::vector<double> distinct_in_order(const std::vector<double>& values) {
  std::vector<double> out;
  for (double v : values) {
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ValidationError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError("CSV has no column '" + std::string(name) + "'");
}

bool CsvTable::has_column(std::string_view name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false;
  bool any = false;  // current record has content
  int line = 1;
  char c = 0;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          cell += '"';
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      if (!cell.empty()) {
        throw ValidationError("CSV line " + std::to_string(line) + ": stray quote");
      }
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      if (any || !cell.empty()) {
        record.push_back(std::move(cell));
        records.push_back(std::move(record));
      }
      record.clear();
      cell.clear();
      any = false;
      ++line;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw ValidationError("CSV ends inside a quoted cell");
  if (any || !cell.empty()) {
    record.push_back(std::move(cell));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw ValidationError("CSV is empty (no header)");

  CsvTable table;
  table.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != table.header.size()) {
      throw ValidationError("CSV row " + std::to_string(i) + " has " +
                            std::to_string(records[i].size()) + " columns, header has " +
                            std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    const auto& s = cells[i];
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
      out << s;
      continue;
    }
    out << '"';
    for (char c : s) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

namespace {

std::vector<LinkClass> recorded_classes(const SweepResult& result) {
  for (const auto& p : result.points) {
    if (p.association) {
      std::vector<LinkClass> out;
      for (const auto& [cls, v] : p.association->entries) out.push_back(cls);
      return out;
    }
  }
  return {};
}

}  // namespace

std::vector<std::string> sweep_csv_header(const SweepResult& result) {
  std::vector<std::string> h;
  for (const auto& axis : result.axes) h.push_back(axis.parameter);
  for (const char* name : {"stp_analytic", "stp_mc", "stp_mc_stderr", "stp_analytic_err",
                           "mc_trials", "mc_empty_windows", "engines"}) {
    h.emplace_back(name);
  }
  const auto classes = recorded_classes(result);
  for (const auto& cls : classes) h.push_back(std::string(kAssocPrefix) + to_string(cls));
  if (!classes.empty()) h.emplace_back("assoc_err");
  h.emplace_back("error");
  return h;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  write_csv_row(out, sweep_csv_header(result));
  const auto classes = recorded_classes(result);
  for (const auto& p : result.points) {
    std::vector<std::string> row;
    for (double c : p.coords) row.push_back(format_double(c));
    row.push_back(opt_double(p.analytic_stp));
    row.push_back(p.mc ? format_double(p.mc->mean) : "");
    row.push_back(p.mc ? format_double(p.mc->std_error) : "");
    row.push_back(opt_double(p.analytic_error));
    row.push_back(p.mc ? std::to_string(p.mc->trials) : "");
    row.push_back(p.mc_empty_windows ? std::to_string(*p.mc_empty_windows) : "");
    row.push_back(engines_cell(p));
    for (const auto& cls : classes) {
      row.push_back(p.association ? format_double(p.association->at(cls)) : "");
    }
    if (!classes.empty()) row.push_back(p.association ? format_double(p.association->error) : "");
    row.push_back(p.error);
    write_csv_row(out, row);
  }
}

SweepResult read_sweep_csv(std::istream& in,
                           const std::optional<std::vector<GridSpec>>& axes) {
  const CsvTable table = read_csv(in);
  const std::size_t first = table.column("stp_analytic");
  if (first < 1 || first > 2) throw ValidationError("sweep CSV must have 1 or 2 axis columns");
  const std::size_t i_mc = table.column("stp_mc");
  const std::size_t i_se = table.column("stp_mc_stderr");
  const std::size_t i_aerr = table.column("stp_analytic_err");
  const std::size_t i_trials = table.column("mc_trials");
  const std::size_t i_empty = table.column("mc_empty_windows");
  const std::size_t i_eng = table.column("engines");
  const std::size_t i_err = table.column("error");
  std::vector<std::pair<LinkClass, std::size_t>> assoc;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const auto& h = table.header[i];
    if (h.rfind(kAssocPrefix, 0) == 0 && h != "assoc_err") {
      assoc.emplace_back(parse_link_class(std::string_view(h).substr(kAssocPrefix.size())), i);
    }
  }

  SweepResult result;
  for (const auto& row : table.rows) {
    SweepPoint p;
    for (std::size_t a = 0; a < first; ++a) p.coords.push_back(parse_double(row[a]));
    p.analytic_stp = cell_double(row[first]);
    p.analytic_error = cell_double(row[i_aerr]);
    if (!row[i_mc].empty()) {
      Estimate e;
      e.mean = parse_double(row[i_mc]);
      e.std_error = parse_double(row[i_se]);
      e.trials = cell_count(row[i_trials]);
      p.mc = e;
    }
    if (!row[i_empty].empty()) p.mc_empty_windows = cell_count(row[i_empty]);
    const auto& eng = row[i_eng];
    if (eng != "" && eng != "analytic" && eng != "mc" && eng != "analytic+mc") {
      throw ValidationError("bad engines cell '" + eng + "'");
    }
    p.ran_analytic = eng.find("analytic") != std::string::npos;
    p.ran_montecarlo = eng.find("mc") != std::string::npos;
    if (!assoc.empty() && !row[assoc.front().second].empty()) {
      AssociationTable t;
      for (const auto& [cls, i] : assoc) t.entries[cls] = parse_double(row[i]);
      t.error = parse_double(row[table.column("assoc_err")]);
      p.association = t;
    }
    p.error = row[i_err];
    result.points.push_back(std::move(p));
  }

  if (axes) {
    if (axes->size() != first) throw ValidationError("axis count does not match the CSV");
    std::size_t expected = 1;
    for (const auto& g : *axes) expected *= g.values.size();
    if (expected != result.points.size()) {
      throw ValidationError("row count does not match the axes");
    }
    result.axes = *axes;
  } else {
    for (std::size_t a = 0; a < first; ++a) {
      GridSpec g;
      g.parameter = table.header[a];
      result.axes.push_back(g);
    }
    if (first == 1) {
      for (const auto& p : result.points) result.axes[0].values.push_back(p.coords[0]);
    } else {
      std::vector<double> col_a;
      for (const auto& p : result.points) col_a.push_back(p.coords[0]);
      result.axes[0].values = distinct_in_order(col_a);
      const std::size_t nb =
          result.axes[0].values.empty() ? 0 : result.points.size() / result.axes[0].values.size();
      for (std::size_t j = 0; j < nb; ++j) {
        result.axes[1].values.push_back(result.points[j].coords[1]);
      }
    }
  }
  return result;
}

// --- JSON --------------------------------------------------------------------

Json to_json(const NetworkSpec& network) {
  Json layers = Json::array();
  for (const auto& l : network.layers) {
    layers.push_back({{"density", l.density}, {"altitude", l.altitude}, {"power", l.power}});
  }
  const auto& c = network.channel;
  return {{"layers", layers},
          {"channel",
           {{"a", c.a},
            {"b", c.b},
            {"alpha_los", c.alpha_los},
            {"alpha_nlos", c.alpha_nlos},
            {"m_los", c.m_los},
            {"m_nlos", c.m_nlos},
            {"beta", c.beta},
            {"noise", c.noise},
            {"los_model", std::string(to_string(c.los_model))}}}};
}

Json to_json(const SimConfig& sim) {
  return {{"trials", sim.trials},
          {"window_radius", sim.window_radius},
          {"far_field_radius", sim.far_field_radius},
          {"seed", sim.seed},
          {"bin_width", sim.bin_width}};
}

Json to_json(const AnalysisOptions& options) {
  auto q = [](const QuadSpec& s) {
    return Json{{"rel_tol", s.rel_tol},
                {"abs_tol", s.abs_tol},
                {"max_subdivisions", s.max_subdivisions}};
  };
  return {{"inner", q(options.inner)}, {"outer", q(options.outer)}};
}

Json to_json(const GridSpec& grid) {
  return {{"parameter", grid.parameter}, {"values", grid.values}};
}

Json to_json(const AssociationTable& table) {
  Json out = Json::object();
  for (const auto& [cls, v] : table.entries) out[to_string(cls)] = v;
  return out;
}

Json to_json(const Estimate& e) {
  return {{"mean", e.mean}, {"stderr", e.std_error}, {"trials", e.trials}};
}

Json to_json(const SweepMetadata& metadata, const std::vector<GridSpec>& axes) {
  Json ax = Json::array();
  for (const auto& g : axes) ax.push_back(to_json(g));
  Json out = {{"axes", ax}, {"network", to_json(metadata.network)}};
  out["simulation"] = metadata.sim ? to_json(*metadata.sim) : Json();
  out["engine_version"] = metadata.engine_version;
  out["timestamp"] = metadata.timestamp;
  return out;
}

Json to_json(const RunManifest& m) {
  Json out = {{"config_path", m.config_path},
              {"config_sha256", m.config_sha256},
              {"config_text", m.config_text},
              {"command_line", m.command_line}};
  out["seed"] = m.seed ? Json(*m.seed) : Json();
  out["outputs"] = m.outputs;
  out["duration_seconds"] = m.duration_seconds;
  out["engine_version"] = m.engine_version;
  out["timestamp"] = m.timestamp;
  out["extra"] = m.extra;
  return out;
}

RunManifest manifest_from_json(const Json& j) {
  RunManifest m;
  try {
    m.config_path = j.at("config_path").get<std::string>();
    m.config_sha256 = j.at("config_sha256").get<std::string>();
    m.config_text = j.at("config_text").get<std::string>();
    m.command_line = j.at("command_line").get<std::vector<std::string>>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.duration_seconds = j.at("duration_seconds").get<double>();
    m.engine_version = j.at("engine_version").get<std::string>();
    m.timestamp = j.at("timestamp").get<std::string>();
    if (j.contains("extra")) m.extra = j.at("extra");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string manifest_path(const std::string& output_path) {
  return output_path + ".manifest.json";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out.flush()) throw Error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace aerostp
