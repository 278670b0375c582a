#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpival/config_space.hpp"

namespace gpival {

enum class VariogramShape { exponential, gaussian, spherical };

std::string to_string(VariogramShape s);
VariogramShape shape_from_string(const std::string& s);

// Theoretical semivariogram: nugget + sill-scaled shape with the given range.
// gamma(0) is exactly zero; the nugget is the limit from above.
struct VariogramModel {
  VariogramShape shape = VariogramShape::gaussian;
  double nugget = 0.0;
  double sill = 1.0;
  double range = 1.0;

  nlohmann::json to_json() const;
  static VariogramModel from_json(const nlohmann::json& j);
};

// Semivariance at lag h >= 0. Throws on negative h.
double eval_model(const VariogramModel& m, double h);

// Lag h with eval_model(m, h) = g, for g strictly inside (nugget, nugget+sill).
// Closed forms for exponential/gaussian; trigonometric cubic root for spherical.
double inverse_model(const VariogramModel& m, double g);

// Binned Matheron estimator. Bin i covers [edges[i], edges[i+1]).
struct EmpiricalVariogram {
  std::vector<double> bin_edges;        // size bins+1, ascending from 0
  std::vector<double> bin_means;        // semivariance per bin (0 for empty bins)
  std::vector<std::size_t> bin_counts;  // lag pairs per bin

  std::size_t bins() const { return bin_counts.size(); }
  double lag_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  std::size_t populated() const;

  nlohmann::json to_json() const;
  static EmpiricalVariogram from_json(const nlohmann::json& j);
};

inline constexpr std::size_t kIsotropicBins = 50;    // final isotropic variogram
inline constexpr std::size_t kDirectionalBins = 25;  // per-axis directional variograms
inline constexpr double kBinnedDiameterFraction = 0.75;

// Matheron estimator over all point pairs; bins partition [0, max_lag].
// Throws when every bin is empty.
EmpiricalVariogram empirical_variogram(const std::vector<ConfigPoint>& points,
                                       const std::vector<double>& values, std::size_t bins,
                                       double max_lag);

// Only pairs whose separation vector lies within angular_tolerance_deg of
// +/- axis are binned. Throws when no pair qualifies.
EmpiricalVariogram directional_variogram(const std::vector<ConfigPoint>& points,
                                         const std::vector<double>& values, std::size_t axis,
                                         double angular_tolerance_deg, std::size_t bins,
                                         double max_lag);

enum class FitWeighting {
  counts,   // bin pair counts
  uniform,  // unweighted
  cressie,  // counts / gamma_model^2, iteratively reweighted
};

enum class LagConvention { center, upper };

struct FitOptions {
  VariogramShape shape = VariogramShape::gaussian;
  std::optional<double> fixed_nugget;  // nullopt = free nugget (>= 0)
  FitWeighting weighting = FitWeighting::counts;
  double max_range = 0.0;  // upper bound on the fitted range; must be set
  std::size_t starts = 5;  // multi-start count over log-spaced ranges
  // cap the sill at the largest empirical semivariance (keeps the fit off
  // the high-sill ridge when the tail of the curve is unreliable)
  bool cap_sill_at_max = false;
  LagConvention lag_convention = LagConvention::center;
};

// Bounded multi-start Levenberg-Marquardt weighted least squares over
// (nugget, sill, range). Needs >= 3 populated bins.
VariogramModel fit(const EmpiricalVariogram& emp, const FitOptions& options);

// Eq.-style normalized goodness-of-fit: RMSE over populated bins divided by
// the mean empirical semivariance. Throws when that mean is zero.
double nrmse(const VariogramModel& model, const EmpiricalVariogram& emp);

// Diagonal map iota(x) = x / scale with scale_i = r_i * sigma0_i.
struct AnisotropyMap {
  std::vector<double> scale;

  std::size_t dims() const { return scale.size(); }
  ConfigPoint transform(const ConfigPoint& x) const;
  ConfigPoint inverse(const ConfigPoint& x) const;
  double distance(const ConfigPoint& a, const ConfigPoint& b) const;

  static AnisotropyMap identity(std::size_t n);
  nlohmann::json to_json() const;
  static AnisotropyMap from_json(const nlohmann::json& j);
};

struct AnisotropySanity {
  bool sill_spread_flag = false;   // directional sills differ by > 50%
  bool nugget_flag = false;        // nugget large where zero was expected
  std::string message;
};

struct AnisotropyBuild {
  AnisotropyMap map;
  std::vector<double> sigma0;                  // per-dimension coordinate std devs
  std::vector<VariogramModel> directional;     // fitted per axis, on sigma0-prescaled data
  AnisotropySanity sanity;
};

struct AnisotropyOptions {
  VariogramShape shape = VariogramShape::gaussian;
  std::optional<double> fixed_nugget;
  FitWeighting weighting = FitWeighting::counts;
  double angular_tolerance_deg = 22.5;
};

// Directional variograms per axis on prescaled data; Sigma = diag(r_i)*Sigma0.
// Throws (naming the axis) when a directional fit is impossible.
AnisotropyBuild build_anisotropy(const std::vector<ConfigPoint>& points,
                                 const std::vector<double>& values,
                                 const AnisotropyOptions& options);

}  // namespace gpival
