#include "gpival/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gpival/csv.hpp"
#include "gpival/sha256.hpp"

namespace gpival {

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void RunManifest::add_input(const std::string& path) {
  inputs.emplace_back(path, sha256_hex(read_file(path)));
}

void RunManifest::record_output(const std::string& path, const std::string& content) {
  outputs.emplace_back(path, sha256_hex(content));
}

void RunManifest::write(const std::string& out_path) const {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["parameters"] = parameters;
  j["inputs"] = nlohmann::json::object();
  for (const auto& [p, d] : inputs) j["inputs"][p] = d;
  j["outputs"] = nlohmann::json::object();
  for (const auto& [p, d] : outputs) j["outputs"][p] = d;
  auto now = std::chrono::system_clock::now().time_since_epoch();
  j["timestamp_unix_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  write_file_atomic(out_path, j.dump(2) + "\n");
}

std::string sample_to_csv(const std::vector<ConfigPoint>& points, const std::vector<double>* values,
                          const ConfigSpace& space) {
  CsvTable t;
  t.header.push_back("config_id");
  for (const auto& d : space.dimensions()) t.header.push_back(d.name);
  t.header.push_back(kValueColumn);
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<std::string> row;
    row.push_back(std::to_string(i));
    for (double c : points[i]) row.push_back(format_double(c));
    row.push_back(values != nullptr ? format_double((*values)[i]) : std::string{});
    t.rows.push_back(std::move(row));
  }
  return t.to_string();
}

ParsedSample sample_from_csv(const std::string& csv_text, const ConfigSpace& space) {
  CsvTable t = CsvTable::parse(csv_text);
  int id_col = t.column("config_id");
  int val_col = t.column(kValueColumn);
  std::vector<int> dim_cols;
  for (const auto& d : space.dimensions()) {
    int c = t.column(d.name);
    if (c < 0) throw std::invalid_argument("sample csv: missing column " + d.name);
    dim_cols.push_back(c);
  }
  ParsedSample out;
  out.has_values = val_col >= 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    ConfigPoint p(dim_cols.size());
    for (std::size_t i = 0; i < dim_cols.size(); ++i) p[i] = std::stod(row[dim_cols[i]]);
    out.points.push_back(std::move(p));
    out.ids.push_back(id_col >= 0 ? row[id_col] : std::to_string(r));
    if (val_col >= 0) {
      const std::string& v = row[val_col];
      if (v.empty()) {
        out.has_values = false;
      } else {
        out.values.push_back(std::stod(v));
      }
    }
  }
  if (out.has_values && out.values.size() != out.points.size())
    throw std::invalid_argument("sample csv: value column is partially filled");
  if (!out.has_values) out.values.clear();
  return out;
}

std::string report_to_csv(const CriticalReport& report, const ConfigSpace& space) {
  CsvTable t;
  // campaign layout: antenna first, then the configuration, then the model view
  t.header.push_back("antenna");
  std::vector<std::string> dim_order;
  if (space.has_sources()) {
    dim_order = {"f_MHz", "Pin_dBm", "PAR_dB", "BW_MHz", "s_mm", "theta_deg", "x_mm", "y_mm"};
  } else {
    for (const auto& d : space.dimensions()) dim_order.push_back(d.name);
  }
  std::vector<int> dims;
  for (const auto& name : dim_order) {
    int c = space.dimension_index(name);
    if (c >= 0) {
      t.header.push_back(name);
      dims.push_back(c);
    }
  }
  t.header.push_back("dSAR_dB");
  t.header.push_back("model_error_dB");
  t.header.push_back("failure_prob");
  for (const auto& r : report.rows) {
    std::vector<std::string> row;
    row.push_back(r.source);
    for (int c : dims) row.push_back(format_double(r.point[c]));
    row.push_back(format_double(r.predicted_deviation));
    row.push_back(format_double(r.model_error));
    row.push_back(format_double(r.probability));
    t.rows.push_back(std::move(row));
  }
  return t.to_string();
}

CriticalReport report_from_csv(const std::string& csv_text, const ConfigSpace& space) {
  CsvTable t = CsvTable::parse(csv_text);
  std::vector<int> dim_cols(space.dimension_count(), -1);
  for (std::size_t i = 0; i < space.dimension_count(); ++i) {
    dim_cols[i] = t.column(space.dimension(i).name);
    if (dim_cols[i] < 0)
      throw std::invalid_argument("report csv: missing column " + space.dimension(i).name);
  }
  int ant = t.column("antenna");
  int dev = t.column("dSAR_dB");
  int err = t.column("model_error_dB");
  int prob = t.column("failure_prob");
  if (dev < 0 || err < 0 || prob < 0)
    throw std::invalid_argument("report csv: missing dSAR_dB / model_error_dB / failure_prob");
  CriticalReport rep;
  for (const auto& row : t.rows) {
    CriticalRow r;
    r.point.resize(space.dimension_count());
    for (std::size_t i = 0; i < space.dimension_count(); ++i) r.point[i] = std::stod(row[dim_cols[i]]);
    r.source = ant >= 0 ? row[ant] : "";
    r.predicted_deviation = std::stod(row[dev]);
    r.model_error = std::stod(row[err]);
    r.probability = std::stod(row[prob]);
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

VerifyResult verify_measurements(const std::string& csv_text, double mpe_db) {
  CsvTable t = CsvTable::parse(csv_text);
  int col = t.column("measured_dB");
  if (col < 0) throw std::invalid_argument("verify: csv must carry a measured_dB column");
  VerifyResult out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    double v = std::stod(t.rows[r][col]);
    bool pass = std::fabs(v) <= mpe_db;
    out.rows.push_back({r, v, mpe_db, pass});
    out.overall = out.overall && pass;
  }
  return out;
}

ConfigSpace builtin_space(const std::string& name) {
  if (name == "sar-array") return build_sar_array_space();
  if (name == "sar-scanning") return build_sar_scanning_space();
  throw std::invalid_argument("unknown built-in space: " + name +
                              " (expected sar-array or sar-scanning)");
}

}  // namespace gpival
