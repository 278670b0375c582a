#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpival/config_space.hpp"
#include "gpival/variogram.hpp"

namespace gpival {

// A set of configuration points with measured deviation values.
struct ValuedSample {
  std::vector<ConfigPoint> points;
  std::vector<double> values;
  std::vector<std::string> ids;

  std::size_t size() const { return points.size(); }
  // |points| == |values|, points pairwise distinct
  void validate() const;

  nlohmann::json to_json() const;
  static ValuedSample from_json(const nlohmann::json& j);
};

struct Prediction {
  double mean = 0.0;          // dB
  double kriging_std = 0.0;   // dB, >= 0
  double inflated_std = 0.0;  // kriging_std * (1 + fit_nrmse)
};

// The model triple (sample, anisotropy, variogram) plus fit metadata.
// Immutable after construction; the kriging system factorization is cached
// up front so krige() is safe to call concurrently.
class GpiModel {
 public:
  GpiModel(ValuedSample sample, AnisotropyMap anisotropy, VariogramModel variogram,
           double fit_nrmse, std::shared_ptr<const ConfigSpace> space = nullptr);

  GpiModel(GpiModel&& other) noexcept;
  GpiModel& operator=(GpiModel&& other) noexcept;
  GpiModel(const GpiModel&) = delete;
  GpiModel& operator=(const GpiModel&) = delete;

  const ValuedSample& sample() const { return sample_; }
  const AnisotropyMap& anisotropy() const { return anisotropy_; }
  const VariogramModel& variogram() const { return variogram_; }
  double fit_nrmse() const { return fit_nrmse_; }
  const std::shared_ptr<const ConfigSpace>& space() const { return space_; }

  const EmpiricalVariogram* empirical() const {
    return empirical_.has_value() ? &*empirical_ : nullptr;
  }
  void attach_empirical(EmpiricalVariogram emp) { empirical_ = std::move(emp); }

  Prediction krige(const ConfigPoint& x) const;
  // Same prediction for a point already in iota coordinates (search fast path).
  Prediction krige_iso(const Eigen::VectorXd& x_iso) const;

  // Predicted means for a batch of iota-space points; one multi-RHS solve
  // against the cached factorization.
  std::vector<double> krige_mean_batch(const std::vector<ConfigPoint>& points_iso) const;

  // Ordinary-kriging weights for a query point (test and diagnostics access).
  Eigen::VectorXd kriging_weights(const ConfigPoint& x) const;

  // (z - mean) / inflated_std per test point; throws when any inflated_std
  // is zero, naming the offending point.
  std::vector<double> standardized_residuals(const ValuedSample& test) const;

  long negative_variance_clamps() const { return clamp_count_.load(); }

  nlohmann::json to_json() const;
  static GpiModel from_json(const nlohmann::json& j);

 private:
  Eigen::VectorXd rhs_for(const Eigen::VectorXd& x_iso) const;
  Prediction predict(const Eigen::VectorXd& x_iso) const;

  ValuedSample sample_;
  AnisotropyMap anisotropy_;
  VariogramModel variogram_;
  double fit_nrmse_ = 0.0;
  std::shared_ptr<const ConfigSpace> space_;
  std::optional<EmpiricalVariogram> empirical_;

  std::vector<Eigen::VectorXd> iso_points_;
  Eigen::MatrixXd gamma_;  // k x k semivariance matrix (with stabilizing jitter)
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;  // (k+1) x (k+1) augmented system
  double jitter_ = 0.0;
  mutable std::atomic<long> clamp_count_{0};
};

}  // namespace gpival
