#include "gpival/confirmation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpival/normal.hpp"

namespace gpival {

namespace {

double poly(const double* c, int n, double x) {
  double v = c[n - 1];
  for (int i = n - 2; i >= 0; --i) v = v * x + c[i];
  return v;
}

}  // namespace

// Royston (1995), AS R94. Weights from Blom scores with polynomial-corrected
// endpoints; p-value via a normalizing transformation of 1 - W.
ShapiroWilk shapiro_wilk(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 3 || n > 5000) throw std::invalid_argument("shapiro_wilk: n must be in [3, 5000]");

  std::vector<double> x = values;
  std::sort(x.begin(), x.end());
  if (x.front() == x.back()) throw std::invalid_argument("shapiro_wilk: zero variance");

  // Blom scores
  std::vector<double> m(n);
  double ssq_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (static_cast<double>(n) + 0.25));
    ssq_m += m[i] * m[i];
  }

  std::vector<double> a(n);
  if (n == 3) {
    a[0] = -std::sqrt(0.5);
    a[1] = 0.0;
    a[2] = std::sqrt(0.5);
  } else {
    double rsn = 1.0 / std::sqrt(static_cast<double>(n));
    static const double c1[6] = {0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056};
    static const double c2[6] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
    double norm = std::sqrt(ssq_m);
    double an = m[n - 1] / norm + poly(c1, 6, rsn);
    if (n > 5) {
      double an1 = m[n - 2] / norm + poly(c2, 6, rsn);
      double phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                   (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
      double sp = std::sqrt(phi);
      for (std::size_t i = 2; i + 2 < n; ++i) a[i] = m[i] / sp;
      a[n - 1] = an;
      a[n - 2] = an1;
      a[0] = -an;
      a[1] = -an1;
    } else {
      double phi = (ssq_m - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
      double sp = std::sqrt(phi);
      for (std::size_t i = 1; i + 1 < n; ++i) a[i] = m[i] / sp;
      a[n - 1] = an;
      a[0] = -an;
    }
  }

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += a[i] * x[i];
    den += (x[i] - mean) * (x[i] - mean);
  }
  double w = num * num / den;
  w = std::min(w, 1.0);

  double p;
  double nn = static_cast<double>(n);
  if (n == 3) {
    const double pi6 = 1.90985931710274;   // 6/pi
    const double stqr = 1.04719755119660;  // asin(sqrt(3/4))
    p = pi6 * (std::asin(std::sqrt(w)) - stqr);
    p = std::clamp(p, 0.0, 1.0);
  } else if (n <= 11) {
    double g = -2.273 + 0.459 * nn;
    double mu = 0.5440 - 0.39978 * nn + 0.025054 * nn * nn - 0.0006714 * nn * nn * nn;
    double sigma = std::exp(1.3822 - 0.77857 * nn + 0.062767 * nn * nn - 0.0020322 * nn * nn * nn);
    double y = -std::log(g - std::log1p(-w));
    p = 1.0 - normal_cdf((y - mu) / sigma);
  } else {
    double ln = std::log(nn);
    double mu = -1.5861 - 0.31082 * ln - 0.083751 * ln * ln + 0.0038915 * ln * ln * ln;
    double sigma = std::exp(-0.4803 - 0.082676 * ln + 0.0030302 * ln * ln);
    double y = std::log1p(-w);
    p = 1.0 - normal_cdf((y - mu) / sigma);
  }
  return {w, p};
}

QqMetrics qq_metrics(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 10) throw std::invalid_argument("qq_metrics: need at least 10 values");
  std::vector<double> x = values;
  std::sort(x.begin(), x.end());

  const double lo = normal_quantile(0.025);
  const double hi = normal_quantile(0.975);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double q = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    if (q < lo || q > hi) continue;
    sx += q;
    sy += x[i];
    sxx += q * q;
    sxy += q * x[i];
    ++m;
  }
  if (m < 2) throw std::runtime_error("qq_metrics: fewer than 2 points inside the quantile window");
  double denom = static_cast<double>(m) * sxx - sx * sx;
  double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / static_cast<double>(m);
  return {intercept, slope};
}

namespace {

// type-7 quantile: linear interpolation at position (n-1)p
double quantile_type7(const std::vector<double>& sorted, double p) {
  double pos = (static_cast<double>(sorted.size()) - 1.0) * p;
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = static_cast<std::size_t>(std::ceil(pos));
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<std::size_t> detect_outliers(const std::vector<double>& values, double r) {
  if (values.size() < 4) throw std::invalid_argument("detect_outliers: need at least 4 values");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double q1 = quantile_type7(sorted, 0.25);
  double q3 = quantile_type7(sorted, 0.75);
  double iqr = q3 - q1;
  double lo = q1 - r * iqr;
  double hi = q3 + r * iqr;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < lo || values[i] > hi) out.push_back(i);
  return out;
}

StageResult goodness_of_fit(const GpiModel& model, double alpha) {
  return {model.fit_nrmse() <= alpha, model.fit_nrmse()};
}

nlohmann::json ConfirmationReport::to_json() const {
  nlohmann::json j;
  j["fit"] = {{"pass", fit.pass}, {"nrmse", fit.value}};
  j["shapiro_wilk"] = {{"pass", shapiro.pass}, {"p_value", shapiro.value}, {"W", sw_w}};
  j["qq"] = {{"location", qq_location.value},
             {"scale", qq_scale.value},
             {"location_pass", qq_location.pass},
             {"scale_pass", qq_scale.pass}};
  j["overall"] = overall;
  j["residuals"] = residuals;
  j["stage_order"] = {"fit", "shapiro_wilk", "qq"};
  return j;
}

ConfirmationReport confirm(const GpiModel& model, const ValuedSample& test,
                           const ConfirmationThresholds& th) {
  if (test.size() < 20)
    throw std::invalid_argument("confirm: test sample must contain at least 20 points");

  ConfirmationReport rep;
  rep.fit = goodness_of_fit(model, th.nrmse_alpha);
  rep.residuals = model.standardized_residuals(test);

  auto sw = shapiro_wilk(rep.residuals);
  rep.sw_w = sw.w;
  rep.shapiro = {sw.p_value > th.sw_alpha, sw.p_value};

  auto qq = qq_metrics(rep.residuals);
  rep.qq_location = {std::fabs(qq.location) <= th.qq_location_max, qq.location};
  rep.qq_scale = {qq.scale >= th.qq_scale_min && qq.scale <= th.qq_scale_max, qq.scale};

  rep.overall = rep.fit.pass && rep.shapiro.pass && rep.qq_location.pass && rep.qq_scale.pass;
  return rep;
}

}  // namespace gpival
