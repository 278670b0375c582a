#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace gpival {

using ConfigPoint = std::vector<double>;

enum class Treatment { continuous, discrete_raster, index_based };

std::string to_string(Treatment t);
Treatment treatment_from_string(const std::string& s);

// One axis of the validation domain: an interval, how the sampler treats it,
// and (optionally) the raster of meaningful values used for snapping.
struct Dimension {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  Treatment treatment = Treatment::continuous;
  std::vector<double> raster;  // ascending, within [lower, upper]

  void validate() const;
};

enum class SourceKind { dipole, vpifa, cpifa };

std::string to_string(SourceKind k);
SourceKind source_kind_from_string(const std::string& s);

// A valid (frequency, distance) pair of a source together with its minimal
// input power (the bottom of the 20 dB power ladder).
struct SourceEntry {
  double f_mhz = 0.0;
  double s_mm = 0.0;
  double pmin_dbm = 0.0;
};

struct SourceSpec {
  std::string name;
  SourceKind kind = SourceKind::dipole;
  std::vector<SourceEntry> entries;

  std::vector<double> frequencies() const;
  std::vector<double> distances_for(double f_mhz) const;
};

struct ModulationSpec {
  int id = 0;
  std::string description;
  double par_db = 0.0;
  double bw_mhz = 0.0;
};

// Result of nearest-snapping: the measurable configuration and, when the
// space has sources, the source resolved from the (frequency, distance) pair.
struct SnappedConfig {
  ConfigPoint point;
  const SourceSpec* source = nullptr;  // null for source-free spaces
};

// The validation domain X: a product of per-dimension intervals (plus source
// and modulation tables for SAR spaces). Immutable after construction.
class ConfigSpace {
 public:
  ConfigSpace(std::string name, std::vector<Dimension> dimensions,
              std::vector<SourceSpec> sources = {},
              std::vector<ModulationSpec> modulations = {});

  const std::string& name() const { return name_; }
  const std::vector<Dimension>& dimensions() const { return dims_; }
  const std::vector<SourceSpec>& sources() const { return sources_; }
  const std::vector<ModulationSpec>& modulations() const { return mods_; }

  std::size_t dimension_count() const { return dims_.size(); }
  const Dimension& dimension(std::size_t i) const { return dims_.at(i); }
  // -1 when absent
  int dimension_index(const std::string& name) const;
  bool has_sources() const { return !sources_.empty(); }

  std::vector<double> lower_bounds() const;
  std::vector<double> upper_bounds() const;
  // Euclidean length of the box diagonal.
  double diameter() const;

  // Point lies inside the box and, for SAR spaces, its (f, s) pair resolves
  // to a source and its power lies on that source's ladder.
  bool is_valid(const ConfigPoint& p) const;
  bool in_box(const ConfigPoint& p) const;

  // Exact (f, s) source lookup; nullptr when the pair is not measurable.
  const SourceSpec* resolve_source(double f_mhz, double s_mm) const;

  // Nearest valid (f, s) pair; frequency primary, distance secondary.
  struct SourceMatch {
    const SourceSpec* source;
    SourceEntry entry;
  };
  SourceMatch nearest_source(double f_mhz, double s_mm) const;

  nlohmann::json to_json() const;
  static ConfigSpace from_json(const nlohmann::json& j);

 private:
  std::string name_;
  std::vector<Dimension> dims_;
  std::vector<SourceSpec> sources_;
  std::vector<ModulationSpec> mods_;
  int freq_dim_ = -1;
  int dist_dim_ = -1;
  int power_dim_ = -1;
};

// Maximum permissible error in dB from the expanded system and source
// uncertainties (fractions).
double mpe(double u_system, double u_source);

// P_in,min lookup; throws std::invalid_argument when (f, s) is not valid
// for the source.
double min_power(const SourceSpec& source, double f_mhz, double s_mm);

// Number of 1 dB power steps above P_in,min (ladder {Pmin, ..., Pmin+20}).
inline constexpr int kPowerSteps = 20;

// Coordinate-wise floor onto the rasters; the power coordinate is an index
// j in [0, 21] and maps to Pmin + floor(j) dBm (21 clamps to 20). When the
// floored (f, s) pair resolves no source the power index is left as-is and
// the point fails is_valid(); samplers treat that as a collision and redraw.
ConfigPoint snap_floor(const ConfigPoint& p, const ConfigSpace& space);

// Nearest meaningful configuration per coordinate, with the source resolved
// from the (frequency, distance) pair; none when no source exists.
std::optional<SnappedConfig> snap_nearest(const ConfigPoint& p, const ConfigSpace& space);

// Built-in spaces (Table-driven).
ConfigSpace build_sar_array_space();
ConfigSpace build_sar_scanning_space();

// Plain box of continuous dimensions; used by benchmarks and tests.
ConfigSpace make_box_space(std::string name,
                           std::vector<std::tuple<std::string, double, double>> dims);

}  // namespace gpival
