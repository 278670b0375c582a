#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpival/config_space.hpp"
#include "gpival/critical_search.hpp"
#include "gpival/kriging.hpp"

namespace gpival {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kValueColumn = "deviation_dB";

// Write-to-temp + atomic rename; never leaves partial outputs behind.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Run manifest: command, seeds, parameters, and SHA-256 digests of every
// input and output file. Written beside each output as <out>.manifest.json.
struct RunManifest {
  std::string command;
  nlohmann::json parameters;
  std::vector<std::pair<std::string, std::string>> inputs;   // (path, digest)
  std::vector<std::pair<std::string, std::string>> outputs;  // (path, digest)

  void add_input(const std::string& path);
  void record_output(const std::string& path, const std::string& content);
  void write(const std::string& out_path) const;
};

// Measurement-request / measured-sample CSV: config_id, one column per
// dimension, then the deviation column (empty in requests).
std::string sample_to_csv(const std::vector<ConfigPoint>& points,
                          const std::vector<double>* values, const ConfigSpace& space);

struct ParsedSample {
  std::vector<ConfigPoint> points;
  std::vector<std::string> ids;
  std::vector<double> values;  // empty when the value column is blank
  bool has_values = false;
};
ParsedSample sample_from_csv(const std::string& csv_text, const ConfigSpace& space);

// Critical report CSV with the measurement-campaign column layout.
std::string report_to_csv(const CriticalReport& report, const ConfigSpace& space);
CriticalReport report_from_csv(const std::string& csv_text, const ConfigSpace& space);

// Verification of measured follow-up values against the MPE.
struct VerifyRow {
  std::size_t row_index;
  double measured_db;
  double mpe_db;
  bool pass;
};
struct VerifyResult {
  std::vector<VerifyRow> rows;
  bool overall = true;  // vacuous pass on empty input
};
// The CSV must carry a `measured_dB` column.
VerifyResult verify_measurements(const std::string& csv_text, double mpe_db);

// Named built-in space lookup ("sar-array", "sar-scanning").
ConfigSpace builtin_space(const std::string& name);

}  // namespace gpival
