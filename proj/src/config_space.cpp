#include "gpival/config_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpival {

std::string to_string(Treatment t) {
  switch (t) {
    case Treatment::continuous: return "continuous";
    case Treatment::discrete_raster: return "discrete-raster";
    case Treatment::index_based: return "index-based";
  }
  throw std::logic_error("unknown treatment");
}

Treatment treatment_from_string(const std::string& s) {
  if (s == "continuous") return Treatment::continuous;
  if (s == "discrete-raster") return Treatment::discrete_raster;
  if (s == "index-based") return Treatment::index_based;
  throw std::invalid_argument("unknown treatment: " + s);
}

std::string to_string(SourceKind k) {
  switch (k) {
    case SourceKind::dipole: return "dipole";
    case SourceKind::vpifa: return "vpifa";
    case SourceKind::cpifa: return "cpifa";
  }
  throw std::logic_error("unknown source kind");
}

SourceKind source_kind_from_string(const std::string& s) {
  if (s == "dipole") return SourceKind::dipole;
  if (s == "vpifa") return SourceKind::vpifa;
  if (s == "cpifa") return SourceKind::cpifa;
  throw std::invalid_argument("unknown source kind: " + s);
}

void Dimension::validate() const {
  if (!(lower < upper)) throw std::invalid_argument("dimension " + name + ": lower must be < upper");
  double prev = -std::numeric_limits<double>::infinity();
  for (double v : raster) {
    if (v < lower || v > upper) throw std::invalid_argument("dimension " + name + ": raster value outside bounds");
    if (v <= prev) throw std::invalid_argument("dimension " + name + ": raster not strictly ascending");
    prev = v;
  }
}

std::vector<double> SourceSpec::frequencies() const {
  std::vector<double> out;
  for (const auto& e : entries)
    if (std::find(out.begin(), out.end(), e.f_mhz) == out.end()) out.push_back(e.f_mhz);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> SourceSpec::distances_for(double f_mhz) const {
  std::vector<double> out;
  for (const auto& e : entries)
    if (e.f_mhz == f_mhz) out.push_back(e.s_mm);
  std::sort(out.begin(), out.end());
  return out;
}

ConfigSpace::ConfigSpace(std::string name, std::vector<Dimension> dimensions,
                         std::vector<SourceSpec> sources, std::vector<ModulationSpec> modulations)
    : name_(std::move(name)),
      dims_(std::move(dimensions)),
      sources_(std::move(sources)),
      mods_(std::move(modulations)) {
  if (dims_.empty()) throw std::invalid_argument("config space needs at least one dimension");
  for (const auto& d : dims_) d.validate();
  freq_dim_ = dimension_index("f_MHz");
  dist_dim_ = dimension_index("s_mm");
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (dims_[i].treatment == Treatment::index_based) power_dim_ = static_cast<int>(i);
  if (has_sources() && (freq_dim_ < 0 || dist_dim_ < 0))
    throw std::invalid_argument("space with sources must have f_MHz and s_mm dimensions");
}

int ConfigSpace::dimension_index(const std::string& name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (dims_[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> ConfigSpace::lower_bounds() const {
  std::vector<double> out(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = dims_[i].lower;
  return out;
}

std::vector<double> ConfigSpace::upper_bounds() const {
  std::vector<double> out(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) out[i] = dims_[i].upper;
  return out;
}

double ConfigSpace::diameter() const {
  double sum = 0.0;
  for (const auto& d : dims_) sum += (d.upper - d.lower) * (d.upper - d.lower);
  return std::sqrt(sum);
}

bool ConfigSpace::in_box(const ConfigPoint& p) const {
  if (p.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i)
    if (p[i] < dims_[i].lower - 1e-12 || p[i] > dims_[i].upper + 1e-12) return false;
  return true;
}

bool ConfigSpace::is_valid(const ConfigPoint& p) const {
  if (!in_box(p)) return false;
  if (!has_sources()) return true;
  const SourceSpec* src = resolve_source(p[freq_dim_], p[dist_dim_]);
  if (src == nullptr) return false;
  if (power_dim_ >= 0) {
    double pmin = min_power(*src, p[freq_dim_], p[dist_dim_]);
    double pw = p[power_dim_];
    if (pw < pmin - 1e-9 || pw > pmin + kPowerSteps + 1e-9) return false;
  }
  return true;
}

const SourceSpec* ConfigSpace::resolve_source(double f_mhz, double s_mm) const {
  for (const auto& src : sources_)
    for (const auto& e : src.entries)
      if (e.f_mhz == f_mhz && e.s_mm == s_mm) return &src;
  return nullptr;
}

ConfigSpace::SourceMatch ConfigSpace::nearest_source(double f_mhz, double s_mm) const {
  if (sources_.empty()) throw std::logic_error("nearest_source on a source-free space");
  const SourceSpec* best_src = nullptr;
  SourceEntry best{};
  double best_df = std::numeric_limits<double>::infinity();
  double best_ds = std::numeric_limits<double>::infinity();
  for (const auto& src : sources_) {
    for (const auto& e : src.entries) {
      double df = std::fabs(e.f_mhz - f_mhz);
      double ds = std::fabs(e.s_mm - s_mm);
      // frequency primary, distance secondary
      if (df < best_df - 1e-12 || (std::fabs(df - best_df) <= 1e-12 && ds < best_ds)) {
        best_df = df;
        best_ds = ds;
        best_src = &src;
        best = e;
      }
    }
  }
  return {best_src, best};
}

double mpe(double u_system, double u_source) {
  if (u_system < 0.0 || u_source < 0.0) throw std::invalid_argument("mpe: uncertainties must be >= 0");
  return 10.0 * std::log10(1.0 + u_system + u_source);
}

double min_power(const SourceSpec& source, double f_mhz, double s_mm) {
  for (const auto& e : source.entries)
    if (e.f_mhz == f_mhz && e.s_mm == s_mm) return e.pmin_dbm;
  throw std::invalid_argument("no such source configuration: " + source.name + " f=" +
                              std::to_string(f_mhz) + " s=" + std::to_string(s_mm));
}

namespace {

double floor_on_raster(double v, const std::vector<double>& raster) {
  // largest raster value <= v; clamps below the first value
  auto it = std::upper_bound(raster.begin(), raster.end(), v);
  if (it == raster.begin()) return raster.front();
  return *(it - 1);
}

double nearest_on_raster(double v, const std::vector<double>& raster) {
  auto it = std::lower_bound(raster.begin(), raster.end(), v);
  if (it == raster.begin()) return raster.front();
  if (it == raster.end()) return raster.back();
  double hi = *it, lo = *(it - 1);
  return (v - lo <= hi - v) ? lo : hi;
}

}  // namespace

ConfigPoint snap_floor(const ConfigPoint& p, const ConfigSpace& space) {
  if (p.size() != space.dimension_count()) throw std::invalid_argument("snap_floor: dimension mismatch");
  ConfigPoint out = p;
  int power_dim = -1;
  int fi = space.dimension_index("f_MHz");
  int si = space.dimension_index("s_mm");
  for (std::size_t i = 0; i < space.dimension_count(); ++i) {
    const Dimension& d = space.dimension(i);
    switch (d.treatment) {
      case Treatment::continuous:
        break;
      case Treatment::discrete_raster:
        if (!d.raster.empty()) out[i] = floor_on_raster(p[i], d.raster);
        break;
      case Treatment::index_based:
        power_dim = static_cast<int>(i);
        break;
    }
  }
  if (space.has_sources()) {
    // the distance raster is frequency dependent: floor over the distances
    // measurable at the floored frequency (clamping up below the smallest)
    std::vector<double> valid;
    for (const auto& src : space.sources())
      for (const auto& e : src.entries)
        if (e.f_mhz == out[fi]) valid.push_back(e.s_mm);
    if (!valid.empty()) {
      std::sort(valid.begin(), valid.end());
      out[si] = floor_on_raster(p[si], valid);
    }
    if (power_dim >= 0) {
      const SourceSpec* src = space.resolve_source(out[fi], out[si]);
      double j = std::floor(p[power_dim]);
      j = std::clamp(j, 0.0, static_cast<double>(kPowerSteps));  // index 21 clamps to 20
      if (src != nullptr) {
        out[power_dim] = min_power(*src, out[fi], out[si]) + j;
      } else {
        out[power_dim] = j;  // unresolvable source; point will fail is_valid()
      }
    }
  }
  return out;
}

std::optional<SnappedConfig> snap_nearest(const ConfigPoint& p, const ConfigSpace& space) {
  if (p.size() != space.dimension_count()) throw std::invalid_argument("snap_nearest: dimension mismatch");
  ConfigPoint out = p;
  int power_dim = -1;
  for (std::size_t i = 0; i < space.dimension_count(); ++i) {
    const Dimension& d = space.dimension(i);
    if (d.treatment == Treatment::index_based) {
      power_dim = static_cast<int>(i);
      continue;
    }
    if (!d.raster.empty()) out[i] = nearest_on_raster(p[i], d.raster);
  }
  if (!space.has_sources()) return SnappedConfig{out, nullptr};

  int fi = space.dimension_index("f_MHz");
  int si = space.dimension_index("s_mm");
  auto match = space.nearest_source(p[fi], p[si]);
  if (match.source == nullptr) return std::nullopt;
  out[fi] = match.entry.f_mhz;
  out[si] = match.entry.s_mm;
  if (power_dim >= 0) {
    double j = std::round(p[power_dim] - match.entry.pmin_dbm);
    j = std::clamp(j, 0.0, static_cast<double>(kPowerSteps));
    out[power_dim] = match.entry.pmin_dbm + j;
  }
  return SnappedConfig{out, match.source};
}

nlohmann::json ConfigSpace::to_json() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["name"] = name_;
  j["dimensions"] = nlohmann::json::array();
  for (const auto& d : dims_) {
    nlohmann::json dj;
    dj["name"] = d.name;
    dj["lower"] = d.lower;
    dj["upper"] = d.upper;
    dj["treatment"] = to_string(d.treatment);
    dj["raster"] = d.raster;
    j["dimensions"].push_back(dj);
  }
  j["sources"] = nlohmann::json::array();
  for (const auto& s : sources_) {
    nlohmann::json sj;
    sj["name"] = s.name;
    sj["kind"] = to_string(s.kind);
    sj["entries"] = nlohmann::json::array();
    for (const auto& e : s.entries)
      sj["entries"].push_back({{"f_MHz", e.f_mhz}, {"s_mm", e.s_mm}, {"pmin_dBm", e.pmin_dbm}});
    j["sources"].push_back(sj);
  }
  j["modulations"] = nlohmann::json::array();
  for (const auto& m : mods_)
    j["modulations"].push_back(
        {{"id", m.id}, {"description", m.description}, {"PAR_dB", m.par_db}, {"BW_MHz", m.bw_mhz}});
  return j;
}

ConfigSpace ConfigSpace::from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != 1)
    throw std::invalid_argument("config space: unsupported format_version");
  std::vector<Dimension> dims;
  for (const auto& dj : j.at("dimensions")) {
    Dimension d;
    d.name = dj.at("name").get<std::string>();
    d.lower = dj.at("lower").get<double>();
    d.upper = dj.at("upper").get<double>();
    d.treatment = treatment_from_string(dj.at("treatment").get<std::string>());
    d.raster = dj.value("raster", std::vector<double>{});
    dims.push_back(std::move(d));
  }
  std::vector<SourceSpec> sources;
  for (const auto& sj : j.value("sources", nlohmann::json::array())) {
    SourceSpec s;
    s.name = sj.at("name").get<std::string>();
    s.kind = source_kind_from_string(sj.at("kind").get<std::string>());
    for (const auto& ej : sj.at("entries"))
      s.entries.push_back(
          {ej.at("f_MHz").get<double>(), ej.at("s_mm").get<double>(), ej.at("pmin_dBm").get<double>()});
    sources.push_back(std::move(s));
  }
  std::vector<ModulationSpec> mods;
  for (const auto& mj : j.value("modulations", nlohmann::json::array()))
    mods.push_back({mj.at("id").get<int>(), mj.at("description").get<std::string>(),
                    mj.at("PAR_dB").get<double>(), mj.at("BW_MHz").get<double>()});
  return ConfigSpace(j.at("name").get<std::string>(), std::move(dims), std::move(sources),
                     std::move(mods));
}

namespace {

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> out;
  for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
  return out;
}

std::vector<ModulationSpec> modulation_table() {
  return {
      {1, "Unmodulated carrier (CW)", 0.0, 0.0},
      {2, "Pulse signal, 10 ms period, 10% duty cycle", 10.0, 0.0},
      {3, "WCDMA, 12.2 kbps RMC, IS-2000", 2.91, 5.0},
      {4, "UMTS-FDD (HSDPA)", 3.98, 5.0},
      {5, "LTE-TDD (SC-FDMA, 1 RB, 20 MHz, QPSK, UL Subframe=2,7)", 11.96, 0.2},
      {6, "LTE-FDD (SC-FDMA, 100% RB, 1.4 MHz, QPSK)", 5.76, 1.4},
      {7, "LTE-FDD (SC-FDMA, 100% RB, 1.4 MHz, 16-QAM)", 6.41, 1.4},
      {8, "LTE-TDD (SC-FDMA, 1 RB, 1.4 MHz, 64-QAM)", 10.26, 1.4},
      {9, "LTE-FDD (SC-FDMA, 100% RB, 3 MHz, QPSK)", 5.73, 3.0},
      {10, "LTE-FDD (SC-FDMA, 100% RB, 3 MHz, 64-QAM)", 6.65, 3.0},
      {11, "LTE-FDD (SC-FDMA, 100% RB, 5 MHz, QPSK)", 5.75, 5.0},
      {12, "LTE-FDD (SC-FDMA, 100% RB, 5 MHz, 16-QAM)", 6.44, 5.0},
      {13, "LTE-FDD (SC-FDMA, 100% RB, 10 MHz, 64-QAM)", 6.59, 10.0},
      {14, "LTE-FDD (SC-FDMA, 100% RB, 20 MHz, QPSK)", 5.67, 20.0},
      {15, "5G NR (DFT-s-OFDM, 1 RB, 50 MHz, QPSK, 30 kHz)", 5.68, 0.4},
      {16, "5G NR (CP-OFDM, 1 RB, 80 MHz, QPSK, 30 kHz)", 7.89, 0.4},
      {17, "5G NR (CP-OFDM, 1 RB, 100 MHz, QPSK, 30 kHz)", 7.93, 0.4},
      {18, "5G NR (CP-OFDM, 1 RB, 40 MHz, QPSK, 60 kHz)", 7.7, 0.8},
      {19, "5G NR (CP-OFDM, 50% RB, 50 MHz, QPSK, 15 kHz)", 8.43, 25.0},
      {20, "5G NR TDD (CP-OFDM, 100% RB, 100 MHz, 256-QAM, 30 kHz)", 10.28, 100.0},
      {21, "IEEE 802.11a/h WiFi 5 GHz (OFDM, 24 Mbps)", 9.38, 20.0},
      {22, "IEEE 802.11a/h WiFi 5 GHz (OFDM, 36 Mbps)", 10.12, 20.0},
      {23, "IEEE 802.11ax (40 MHz, MCS1, 90% duty cycle)", 8.91, 40.0},
      {24, "IEEE 802.11ax (80 MHz, MCS5, 90% duty cycle)", 8.9, 80.0},
  };
}

std::vector<SourceSpec> source_table() {
  // P_in,min tables; dipoles at 300/450/750 MHz exclude the 5 mm distance.
  std::vector<SourceSpec> out;
  auto dip = [&](std::string name, double f, std::vector<std::pair<double, double>> sp) {
    SourceSpec s{std::move(name), SourceKind::dipole, {}};
    for (auto [dist, pmin] : sp) s.entries.push_back({f, dist, pmin});
    out.push_back(std::move(s));
  };
  dip("D300", 300, {{15, 16}, {25, 17}});
  dip("D450", 450, {{15, 14}, {25, 15}});
  dip("D750", 750, {{15, 11}, {25, 13}});
  dip("D835", 835, {{5, 10}, {15, 10}, {25, 13}});
  dip("D900", 900, {{5, 9}, {15, 10}, {25, 12}});
  dip("D1450", 1450, {{5, 5}, {10, 6}, {25, 12}});
  dip("D1750", 1750, {{5, 4}, {10, 5}, {25, 12}});
  dip("D1950", 1950, {{5, 2}, {10, 4}, {25, 12}});
  dip("D2300", 2300, {{5, 1}, {10, 3}, {25, 12}});
  dip("D2450", 2450, {{5, 0}, {10, 3}, {25, 12}});
  dip("D2600", 2600, {{5, 0}, {10, 3}, {25, 12}});
  dip("D3700", 3700, {{5, -2}, {10, 2}, {25, 12}});
  dip("D4200", 4200, {{5, -3}, {10, 2}, {25, 12}});
  dip("D4600", 4600, {{5, -3}, {10, 2}, {25, 11}});
  // D5000 covers the four top frequencies
  {
    SourceSpec s{"D5000", SourceKind::dipole, {}};
    s.entries = {{5200, 5, -4}, {5200, 10, 2}, {5200, 25, 10},
                 {5500, 5, -5}, {5500, 10, 1}, {5500, 25, 10},
                 {5600, 5, -4}, {5600, 10, 1}, {5600, 25, 10},
                 {5800, 5, -4}, {5800, 10, 1}, {5800, 25, 8}};
    out.push_back(std::move(s));
  }
  out.push_back({"V750", SourceKind::vpifa, {{750, 2, 9}}});
  out.push_back({"V835", SourceKind::vpifa, {{835, 2, 9}}});
  out.push_back({"V1950", SourceKind::vpifa, {{1950, 2, 11}}});
  out.push_back({"V3700", SourceKind::vpifa, {{3700, 2, 11}}});
  out.push_back({"C2450", SourceKind::cpifa, {{2450, 7, 12}}});
  return out;
}

std::vector<Dimension> sar_dimensions(bool with_location) {
  std::vector<double> freqs = {300,  450,  750,  835,  900,  1450, 1750, 1950, 2300,
                               2450, 2600, 3700, 4200, 4600, 5200, 5500, 5600, 5800};
  std::vector<double> pars = {0,    2.91, 3.98, 5.67, 5.68, 5.73, 5.75, 5.76,
                              6.41, 6.44, 6.59, 6.65, 7.7,  7.89, 7.93, 8.43,
                              8.9,  8.91, 9.38, 10.0, 10.12, 10.26, 10.28, 11.96};
  std::vector<double> bws = {0, 0.2, 0.4, 0.8, 1.4, 3, 5, 10, 20, 25, 40, 80, 100};

  std::vector<Dimension> dims;
  dims.push_back({"f_MHz", 300, 5800, Treatment::discrete_raster, freqs});
  dims.push_back({"s_mm", 2, 25, Treatment::discrete_raster, {2, 5, 7, 10, 15, 25}});
  dims.push_back({"theta_deg", 0, 360, Treatment::continuous, arange(0, 345, 15)});
  if (with_location) {
    // array bounds cover the measurable surface; 1 mm raster
    dims.push_back({"x_mm", -60, 60, Treatment::continuous, arange(-60, 60, 1)});
    dims.push_back({"y_mm", -110, 110, Treatment::continuous, arange(-110, 110, 1)});
  }
  // absolute dBm bounds span all source ladders (min Pmin .. max Pmin + 20)
  dims.push_back({"Pin_dBm", -5, 37, Treatment::index_based, {}});
  dims.push_back({"PAR_dB", 0, 12, Treatment::discrete_raster, pars});
  dims.push_back({"BW_MHz", 0, 100, Treatment::discrete_raster, bws});
  return dims;
}

}  // namespace

ConfigSpace build_sar_array_space() {
  return ConfigSpace("sar-array", sar_dimensions(true), source_table(), modulation_table());
}

ConfigSpace build_sar_scanning_space() {
  return ConfigSpace("sar-scanning", sar_dimensions(false), source_table(), modulation_table());
}

ConfigSpace make_box_space(std::string name,
                           std::vector<std::tuple<std::string, double, double>> dims) {
  std::vector<Dimension> out;
  for (auto& [n, lo, hi] : dims) out.push_back({n, lo, hi, Treatment::continuous, {}});
  return ConfigSpace(std::move(name), std::move(out));
}

}  // namespace gpival
