#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gpival/kriging.hpp"
#include "gpival/variogram.hpp"

namespace gpival {

enum class WindowBasis { domain_diameter, max_pair_distance };

struct ModelBuildOptions {
  VariogramShape shape = VariogramShape::gaussian;
  std::optional<double> fixed_nugget;  // nullopt = free
  FitWeighting weighting = FitWeighting::counts;
  bool isotropic = false;              // skip anisotropy construction (identity map)
  double angular_tolerance_deg = 22.5; // directional pair selection
  std::size_t isotropic_bins = kIsotropicBins;
  double max_lag_fraction = kBinnedDiameterFraction;
  WindowBasis window_basis = WindowBasis::domain_diameter;
  bool cap_sill_at_max = false;
  LagConvention lag_convention = LagConvention::center;
  bool bound_range_to_window = false;  // cap the fitted range at the binning window
  double outlier_iqr_multiplier = 2.0;
};

struct ModelBuildDiagnostics {
  std::vector<std::size_t> outliers;           // indices excluded from variograms
  std::vector<VariogramModel> directional;
  std::vector<double> sigma0;
  AnisotropySanity sanity;
  double bins_with_min_lags_fraction = 0.0;    // share of bins holding >= 40 pairs
};

struct BuiltModel {
  GpiModel model;
  ModelBuildDiagnostics diagnostics;
};

// Model creation: outlier screening, coordinate prescaling, directional fits,
// the anisotropy map, and the final isotropic fit with its NRMSE. Outliers
// are excluded from variogram construction but stay in the kriging sample.
BuiltModel build_gpi_model(const ValuedSample& sample,
                           std::shared_ptr<const ConfigSpace> space,
                           const ModelBuildOptions& options = {});

// Fit configuration of the analytic benchmark: isotropic gaussian model with
// the nugget pinned at the known noise variance, 10 bins over 85% of the
// largest observed lag, upper-edge lags, the sill capped at the empirical
// maximum, and the fitted range bounded by the window.
ModelBuildOptions benchmark_fit_options(double noise_std);

}  // namespace gpival
