#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "gpival/config_space.hpp"
#include "gpival/variogram.hpp"

namespace gpival {

// Analytic benchmark surface over [0,1]^2.
double sine_wave(double x0, double x1);

// Ground-truth field: deterministic part plus seeded Gaussian noise. Noise is
// hashed per point so evaluation order never matters.
class OracleField {
 public:
  OracleField(std::shared_ptr<const ConfigSpace> space,
              std::function<double(const ConfigPoint&)> deterministic, double noise_std,
              std::uint64_t seed);

  const std::shared_ptr<const ConfigSpace>& space() const { return space_; }
  double noise_std() const { return noise_std_; }

  double deterministic(const ConfigPoint& p) const { return det_(p); }
  double operator()(const ConfigPoint& p) const;

 private:
  std::shared_ptr<const ConfigSpace> space_;
  std::function<double(const ConfigPoint&)> det_;
  double noise_std_;
  std::uint64_t seed_;
};

OracleField sine_wave_field(std::uint64_t seed, double noise_std = 0.001);

enum class DeviceProfile { structured, noisy, injected_fault };

// Synthetic deviation surfaces over the 8-D SAR array space.
//   structured:     smooth anisotropic surface, sill well above the nugget
//   noisy:          near-flat surface with dominant noise
//   injected_fault: structured plus a bump over a seeded (f, s) pocket that
//                   exceeds the MPE at its center by construction
struct SyntheticDevice {
  OracleField field;
  // pocket center and radius in normalized (f, s) coordinates; radius covers
  // the bump's half-height core. Zero radius for profiles without a fault.
  double pocket_f = 0.0;
  double pocket_s = 0.0;
  double pocket_radius = 0.0;

  bool in_pocket(const ConfigPoint& p) const;
};

SyntheticDevice synthetic_device(DeviceProfile profile, std::uint64_t seed);

// Dense-grid ground truth for fields of dimension <= 3.
struct GridOracle {
  double min_value = 0.0;
  double max_value = 0.0;
  ConfigPoint argmin;
  ConfigPoint argmax;
  std::vector<ConfigPoint> sublevel;    // deterministic value <= t_lower
  std::vector<ConfigPoint> superlevel;  // deterministic value >= t_upper
};

GridOracle grid_oracle(const OracleField& field, std::size_t resolution, double t_lower,
                       double t_upper);

// Joint draw from a Gaussian process whose semivariogram is `model` under the
// given metric: smooth part via Cholesky plus iid nugget noise. Deterministic
// for a given seed.
std::vector<double> draw_gaussian_process(const std::vector<ConfigPoint>& points,
                                          const VariogramModel& model, const AnisotropyMap& metric,
                                          std::uint64_t seed);

}  // namespace gpival
