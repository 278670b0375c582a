#include "gpival/model_build.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpival/confirmation.hpp"

namespace gpival {

BuiltModel build_gpi_model(const ValuedSample& sample, std::shared_ptr<const ConfigSpace> space,
                           const ModelBuildOptions& opt) {
  sample.validate();
  if (sample.size() < 4) throw std::invalid_argument("build_gpi_model: need at least 4 points");
  const std::size_t n = sample.points[0].size();

  ModelBuildDiagnostics diag;
  diag.outliers = detect_outliers(sample.values, opt.outlier_iqr_multiplier);

  std::vector<ConfigPoint> vpoints;
  std::vector<double> vvalues;
  vpoints.reserve(sample.size());
  vvalues.reserve(sample.size());
  for (std::size_t i = 0, o = 0; i < sample.size(); ++i) {
    if (o < diag.outliers.size() && diag.outliers[o] == i) {
      ++o;
      continue;
    }
    vpoints.push_back(sample.points[i]);
    vvalues.push_back(sample.values[i]);
  }
  if (vpoints.size() < 4)
    throw std::runtime_error("build_gpi_model: too few points left after outlier screening");

  AnisotropyMap map = AnisotropyMap::identity(n);
  if (!opt.isotropic) {
    AnisotropyOptions aopt;
    aopt.shape = opt.shape;
    aopt.fixed_nugget = opt.fixed_nugget;
    aopt.weighting = opt.weighting;
    aopt.angular_tolerance_deg = opt.angular_tolerance_deg;
    AnisotropyBuild built = build_anisotropy(vpoints, vvalues, aopt);
    map = built.map;
    diag.directional = built.directional;
    diag.sigma0 = built.sigma0;
    diag.sanity = built.sanity;
  }

  std::vector<ConfigPoint> iso(vpoints.size());
  for (std::size_t i = 0; i < vpoints.size(); ++i) iso[i] = map.transform(vpoints[i]);

  // binning window basis: the domain diameter in the isotropic image (the
  // diagonal map sends the box to a box), or the largest observed pair lag
  double diam = 0.0;
  if (opt.window_basis == WindowBasis::max_pair_distance || space == nullptr ||
      space->dimension_count() != n) {
    if (opt.window_basis == WindowBasis::max_pair_distance) {
      for (std::size_t i = 0; i < iso.size(); ++i)
        for (std::size_t j = i + 1; j < iso.size(); ++j) {
          double acc = 0.0;
          for (std::size_t d2 = 0; d2 < n; ++d2) {
            double dd = iso[i][d2] - iso[j][d2];
            acc += dd * dd;
          }
          diam = std::max(diam, acc);
        }
      diam = std::sqrt(diam);
    } else {
      ConfigPoint lo = iso[0], hi = iso[0];
      for (const auto& p : iso)
        for (std::size_t j = 0; j < n; ++j) {
          lo[j] = std::min(lo[j], p[j]);
          hi[j] = std::max(hi[j], p[j]);
        }
      for (std::size_t j = 0; j < n; ++j) diam += (hi[j] - lo[j]) * (hi[j] - lo[j]);
      diam = std::sqrt(diam);
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      double e = (space->dimension(j).upper - space->dimension(j).lower) / map.scale[j];
      diam += e * e;
    }
    diam = std::sqrt(diam);
  }
  if (!(diam > 0.0)) throw std::runtime_error("build_gpi_model: degenerate sample extent");

  const double window = opt.max_lag_fraction * diam;
  EmpiricalVariogram emp = empirical_variogram(iso, vvalues, opt.isotropic_bins, window);

  std::size_t rich = 0;
  for (auto c : emp.bin_counts)
    if (c >= 40) ++rich;
  diag.bins_with_min_lags_fraction = static_cast<double>(rich) / static_cast<double>(emp.bins());

  FitOptions fopt;
  fopt.shape = opt.shape;
  fopt.fixed_nugget = opt.fixed_nugget;
  fopt.weighting = opt.weighting;
  fopt.max_range = opt.bound_range_to_window ? window : diam;
  fopt.cap_sill_at_max = opt.cap_sill_at_max;
  fopt.lag_convention = opt.lag_convention;
  VariogramModel vario = fit(emp, fopt);
  double quality = nrmse(vario, emp);

  GpiModel model(sample, map, vario, quality, std::move(space));
  model.attach_empirical(std::move(emp));
  return {std::move(model), std::move(diag)};
}

ModelBuildOptions benchmark_fit_options(double noise_std) {
  ModelBuildOptions opt;
  opt.shape = VariogramShape::gaussian;
  opt.fixed_nugget = noise_std * noise_std;
  opt.weighting = FitWeighting::uniform;
  opt.isotropic = true;
  opt.isotropic_bins = 10;
  opt.max_lag_fraction = 0.85;
  opt.window_basis = WindowBasis::max_pair_distance;
  opt.cap_sill_at_max = true;
  opt.lag_convention = LagConvention::upper;
  opt.bound_range_to_window = true;
  return opt;
}

}  // namespace gpival
