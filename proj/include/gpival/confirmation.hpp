#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

#include "gpival/kriging.hpp"

namespace gpival {

// Shapiro-Wilk statistic and p-value (Royston's approximation, 3 <= n <= 5000).
// Throws on constant input.
struct ShapiroWilk {
  double w;
  double p_value;
};
ShapiroWilk shapiro_wilk(const std::vector<double>& values);

// QQ line fit of the order statistics against standard-normal quantiles at
// plotting positions (i - 0.5)/n, restricted to theoretical quantiles inside
// [0.025, 0.975]. Returns (location, scale) = (intercept, slope).
struct QqMetrics {
  double location;
  double scale;
};
QqMetrics qq_metrics(const std::vector<double>& values);

// Indices outside [q1 - r*(q3-q1), q3 + r*(q3-q1)] with type-7 quartiles.
std::vector<std::size_t> detect_outliers(const std::vector<double>& values, double r = 2.0);

struct ConfirmationThresholds {
  double nrmse_alpha = 0.25;
  double sw_alpha = 0.05;
  double qq_location_max = 1.0;
  double qq_scale_min = 0.5;
  double qq_scale_max = 1.5;
};

struct StageResult {
  bool pass = false;
  double value = 0.0;
};

// Stage outputs are computed even past a failing stage (diagnostics); the
// overall verdict gates sequentially: fit -> SW -> QQ.
struct ConfirmationReport {
  StageResult fit;          // value = NRMSE
  StageResult shapiro;      // value = p-value
  double sw_w = 0.0;
  StageResult qq_location;  // value = mu
  StageResult qq_scale;     // value = sigma
  bool overall = false;
  std::vector<double> residuals;

  nlohmann::json to_json() const;
};

// NRMSE gate: pass iff model.fit_nrmse() <= alpha.
StageResult goodness_of_fit(const GpiModel& model, double alpha = 0.25);

// Full confirmation: goodness of fit, then standardized residuals through
// Shapiro-Wilk and the QQ location/scale test.
ConfirmationReport confirm(const GpiModel& model, const ValuedSample& test,
                           const ConfirmationThresholds& thresholds = {});

}  // namespace gpival
