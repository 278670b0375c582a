#include "gpival/variogram.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gpival {

std::string to_string(VariogramShape s) {
  switch (s) {
    case VariogramShape::exponential: return "exponential";
    case VariogramShape::gaussian: return "gaussian";
    case VariogramShape::spherical: return "spherical";
  }
  throw std::logic_error("unknown shape");
}

VariogramShape shape_from_string(const std::string& s) {
  if (s == "exponential") return VariogramShape::exponential;
  if (s == "gaussian") return VariogramShape::gaussian;
  if (s == "spherical") return VariogramShape::spherical;
  throw std::invalid_argument("unknown variogram shape: " + s);
}

nlohmann::json VariogramModel::to_json() const {
  return {{"shape", to_string(shape)}, {"nugget", nugget}, {"sill", sill}, {"range", range}};
}

VariogramModel VariogramModel::from_json(const nlohmann::json& j) {
  return {shape_from_string(j.at("shape").get<std::string>()), j.at("nugget").get<double>(),
          j.at("sill").get<double>(), j.at("range").get<double>()};
}

double eval_model(const VariogramModel& m, double h) {
  if (h < 0.0) throw std::invalid_argument("eval_model: negative lag");
  if (h == 0.0) return 0.0;
  switch (m.shape) {
    case VariogramShape::exponential:
      return m.nugget + m.sill * (1.0 - std::exp(-3.0 * h / m.range));
    case VariogramShape::gaussian:
      return m.nugget + m.sill * (1.0 - std::exp(-4.0 * h * h / (m.range * m.range)));
    case VariogramShape::spherical: {
      if (h >= m.range) return m.nugget + m.sill;
      double u = h / m.range;
      return m.nugget + m.sill * (1.5 * u - 0.5 * u * u * u);
    }
  }
  throw std::logic_error("unknown shape");
}

double inverse_model(const VariogramModel& m, double g) {
  if (!(g > m.nugget && g < m.nugget + m.sill))
    throw std::domain_error("inverse_model: g outside (nugget, nugget + sill)");
  double y = (g - m.nugget) / m.sill;  // in (0, 1)
  switch (m.shape) {
    case VariogramShape::exponential:
      return -(m.range / 3.0) * std::log(1.0 - y);
    case VariogramShape::gaussian:
      return 0.5 * m.range * std::sqrt(-std::log(1.0 - y));
    case VariogramShape::spherical:
      // root of 1.5 t - 0.5 t^3 = y on [0, 1]: t = 2 sin(asin(y) / 3)
      return m.range * 2.0 * std::sin(std::asin(y) / 3.0);
  }
  throw std::logic_error("unknown shape");
}

std::size_t EmpiricalVariogram::populated() const {
  std::size_t n = 0;
  for (auto c : bin_counts)
    if (c > 0) ++n;
  return n;
}

nlohmann::json EmpiricalVariogram::to_json() const {
  return {{"bin_edges", bin_edges}, {"bin_means", bin_means}, {"bin_counts", bin_counts}};
}

EmpiricalVariogram EmpiricalVariogram::from_json(const nlohmann::json& j) {
  EmpiricalVariogram e;
  e.bin_edges = j.at("bin_edges").get<std::vector<double>>();
  e.bin_means = j.at("bin_means").get<std::vector<double>>();
  e.bin_counts = j.at("bin_counts").get<std::vector<std::size_t>>();
  return e;
}

namespace {

double sq_dist(const ConfigPoint& a, const ConfigPoint& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

EmpiricalVariogram bin_pairs(const std::vector<ConfigPoint>& points,
                             const std::vector<double>& values, std::size_t bins, double max_lag,
                             int axis, double cos_tol) {
  if (points.size() != values.size()) throw std::invalid_argument("variogram: points/values mismatch");
  if (points.size() < 2) throw std::invalid_argument("variogram: need at least 2 points");
  if (bins < 1) throw std::invalid_argument("variogram: need at least 1 bin");
  if (!(max_lag > 0.0)) throw std::invalid_argument("variogram: max_lag must be positive");

  EmpiricalVariogram out;
  out.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b)
    out.bin_edges[b] = max_lag * static_cast<double>(b) / static_cast<double>(bins);
  out.bin_means.assign(bins, 0.0);
  out.bin_counts.assign(bins, 0);

  const double width = max_lag / static_cast<double>(bins);
  const std::size_t k = points.size();
  bool any = false;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double d2 = sq_dist(points[i], points[j]);
      double d = std::sqrt(d2);
      if (d >= max_lag) continue;
      if (axis >= 0) {
        if (d == 0.0) continue;
        double c = std::fabs(points[i][axis] - points[j][axis]) / d;
        if (c < cos_tol) continue;
      }
      auto b = static_cast<std::size_t>(d / width);
      if (b >= bins) b = bins - 1;
      double dz = values[i] - values[j];
      out.bin_means[b] += dz * dz;
      out.bin_counts[b] += 1;
      any = true;
    }
  }
  if (!any) throw std::runtime_error(axis >= 0 ? "directional variogram: no qualifying pairs"
                                               : "empirical variogram: all bins empty");
  for (std::size_t b = 0; b < bins; ++b)
    if (out.bin_counts[b] > 0) out.bin_means[b] /= 2.0 * static_cast<double>(out.bin_counts[b]);
  return out;
}

}  // namespace

EmpiricalVariogram empirical_variogram(const std::vector<ConfigPoint>& points,
                                       const std::vector<double>& values, std::size_t bins,
                                       double max_lag) {
  return bin_pairs(points, values, bins, max_lag, -1, 0.0);
}

EmpiricalVariogram directional_variogram(const std::vector<ConfigPoint>& points,
                                         const std::vector<double>& values, std::size_t axis,
                                         double angular_tolerance_deg, std::size_t bins,
                                         double max_lag) {
  if (axis >= points.at(0).size()) throw std::invalid_argument("directional_variogram: bad axis");
  double cos_tol = std::cos(angular_tolerance_deg * M_PI / 180.0);
  return bin_pairs(points, values, bins, max_lag, static_cast<int>(axis), cos_tol);
}

namespace {

struct FitData {
  std::vector<double> lag;
  std::vector<double> gamma_hat;
  std::vector<double> counts;
};

FitData populated_bins(const EmpiricalVariogram& emp,
                       LagConvention convention = LagConvention::center) {
  FitData d;
  for (std::size_t b = 0; b < emp.bins(); ++b) {
    if (emp.bin_counts[b] == 0) continue;
    d.lag.push_back(convention == LagConvention::center ? emp.lag_center(b)
                                                        : emp.bin_edges[b + 1]);
    d.gamma_hat.push_back(emp.bin_means[b]);
    d.counts.push_back(static_cast<double>(emp.bin_counts[b]));
  }
  return d;
}

// model value and partials at lag h for parameters (n, s, r)
void model_and_grad(VariogramShape shape, double n, double s, double r, double h, double* val,
                    double* dn, double* ds, double* dr) {
  switch (shape) {
    case VariogramShape::exponential: {
      double e = std::exp(-3.0 * h / r);
      *val = n + s * (1.0 - e);
      *dn = 1.0;
      *ds = 1.0 - e;
      *dr = -s * e * 3.0 * h / (r * r);
      return;
    }
    case VariogramShape::gaussian: {
      double e = std::exp(-4.0 * h * h / (r * r));
      *val = n + s * (1.0 - e);
      *dn = 1.0;
      *ds = 1.0 - e;
      *dr = -s * e * 8.0 * h * h / (r * r * r);
      return;
    }
    case VariogramShape::spherical: {
      if (h >= r) {
        *val = n + s;
        *dn = 1.0;
        *ds = 1.0;
        *dr = 0.0;
        return;
      }
      double u = h / r;
      *val = n + s * (1.5 * u - 0.5 * u * u * u);
      *dn = 1.0;
      *ds = 1.5 * u - 0.5 * u * u * u;
      *dr = -s * 1.5 * (1.0 - u * u) * h / (r * r);
      return;
    }
  }
  throw std::logic_error("unknown shape");
}

struct LmResult {
  double nugget, sill, range, cost;
};

// Levenberg-Marquardt on the active parameters with box projection.
LmResult lm_fit(const FitData& d, const FitOptions& opt, double n0, double s0, double r0,
                double s_hi) {
  const bool free_nugget = !opt.fixed_nugget.has_value();
  const int np = free_nugget ? 3 : 2;
  const double r_lo = 1e-9 * opt.max_range;
  const double s_lo = 1e-12;

  double n = free_nugget ? std::max(n0, 0.0) : *opt.fixed_nugget;
  double s = std::clamp(s0, s_lo, s_hi);
  double r = std::clamp(r0, r_lo, opt.max_range);

  const std::size_t m = d.lag.size();
  std::vector<double> w(m, 1.0);
  auto refresh_weights = [&](double nn, double ss, double rr) {
    for (std::size_t i = 0; i < m; ++i) {
      switch (opt.weighting) {
        case FitWeighting::counts:
          w[i] = d.counts[i];
          break;
        case FitWeighting::uniform:
          w[i] = 1.0;
          break;
        case FitWeighting::cressie: {
          double v, a, b, c;
          model_and_grad(opt.shape, nn, ss, rr, d.lag[i], &v, &a, &b, &c);
          double g = std::max(v, 1e-12);
          w[i] = d.counts[i] / (g * g);
          break;
        }
      }
    }
  };

  auto cost_of = [&](double nn, double ss, double rr) {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double v, a, b, g;
      model_and_grad(opt.shape, nn, ss, rr, d.lag[i], &v, &a, &b, &g);
      double res = v - d.gamma_hat[i];
      c += w[i] * res * res;
    }
    return c;
  };

  const int reweight_rounds = (opt.weighting == FitWeighting::cressie) ? 3 : 1;
  for (int round = 0; round < reweight_rounds; ++round) {
    refresh_weights(n, s, r);
    double lambda = 1e-3;
    double cost = cost_of(n, s, r);
    for (int iter = 0; iter < 200; ++iter) {
      Eigen::MatrixXd JtJ = Eigen::MatrixXd::Zero(np, np);
      Eigen::VectorXd Jtr = Eigen::VectorXd::Zero(np);
      for (std::size_t i = 0; i < m; ++i) {
        double v, dn, ds, dr;
        model_and_grad(opt.shape, n, s, r, d.lag[i], &v, &dn, &ds, &dr);
        double res = v - d.gamma_hat[i];
        Eigen::VectorXd g(np);
        if (free_nugget)
          g << dn, ds, dr;
        else
          g << ds, dr;
        JtJ += w[i] * g * g.transpose();
        Jtr += w[i] * res * g;
      }
      bool stepped = false;
      for (int tries = 0; tries < 25; ++tries) {
        Eigen::MatrixXd A = JtJ;
        for (int q = 0; q < np; ++q) A(q, q) += lambda * (JtJ(q, q) + 1e-12);
        Eigen::VectorXd step = A.ldlt().solve(-Jtr);
        double nn = n, ss = s, rr = r;
        int q = 0;
        if (free_nugget) nn = std::max(n + step(q++), 0.0);
        ss = std::clamp(s + step(q++), s_lo, s_hi);
        rr = std::clamp(r + step(q++), r_lo, opt.max_range);
        double new_cost = cost_of(nn, ss, rr);
        if (new_cost < cost) {
          double drop = cost - new_cost;
          n = nn;
          s = ss;
          r = rr;
          cost = new_cost;
          lambda = std::max(lambda * 0.3, 1e-12);
          stepped = true;
          if (drop < 1e-14 * (1.0 + cost)) iter = 200;
          break;
        }
        lambda *= 10.0;
      }
      if (!stepped) break;
    }
  }
  refresh_weights(n, s, r);
  return {n, s, r, cost_of(n, s, r)};
}

}  // namespace

VariogramModel fit(const EmpiricalVariogram& emp, const FitOptions& opt) {
  if (!(opt.max_range > 0.0)) throw std::invalid_argument("fit: max_range must be set");
  FitData d = populated_bins(emp, opt.lag_convention);
  if (d.lag.size() < 3) throw std::runtime_error("fit: need at least 3 populated bins");

  double top = *std::max_element(d.gamma_hat.begin(), d.gamma_hat.end());
  if (!(top > 0.0)) {
    // constant-valued data: pure-nugget degenerate model
    return {opt.shape, opt.fixed_nugget.value_or(0.0), 1e-12, opt.max_range};
  }
  double n_start = opt.fixed_nugget.value_or(0.5 * d.gamma_hat.front());
  double s_hi = opt.cap_sill_at_max ? top : std::numeric_limits<double>::infinity();

  LmResult best{0, 0, 0, std::numeric_limits<double>::infinity()};
  const std::size_t starts = std::max<std::size_t>(opt.starts, 1);
  for (std::size_t i = 0; i < starts; ++i) {
    double t = (starts == 1) ? 1.0 : static_cast<double>(i) / static_cast<double>(starts - 1);
    double r0 = 0.05 * opt.max_range * std::pow(20.0, t);  // log-spaced in [0.05, 1] * max_range
    LmResult res = lm_fit(d, opt, n_start, top, r0, s_hi);
    if (res.cost < best.cost) best = res;
  }
  if (!std::isfinite(best.cost)) throw std::runtime_error("fit: optimizer failed");
  return {opt.shape, best.nugget, std::max(best.sill, 1e-12), best.range};
}

double nrmse(const VariogramModel& model, const EmpiricalVariogram& emp) {
  FitData d = populated_bins(emp);
  if (d.lag.empty()) throw std::runtime_error("nrmse: no populated bins");
  double sum = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < d.lag.size(); ++i) {
    double y = eval_model(model, d.lag[i]);
    sum += (y - d.gamma_hat[i]) * (y - d.gamma_hat[i]);
    mean += d.gamma_hat[i];
  }
  mean /= static_cast<double>(d.lag.size());
  if (mean == 0.0) throw std::runtime_error("nrmse: empirical mean is zero");
  return std::sqrt(sum / static_cast<double>(d.lag.size())) / mean;
}

ConfigPoint AnisotropyMap::transform(const ConfigPoint& x) const {
  ConfigPoint out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] / scale[i];
  return out;
}

ConfigPoint AnisotropyMap::inverse(const ConfigPoint& x) const {
  ConfigPoint out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * scale[i];
  return out;
}

double AnisotropyMap::distance(const ConfigPoint& a, const ConfigPoint& b) const {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = (a[i] - b[i]) / scale[i];
    s += d * d;
  }
  return std::sqrt(s);
}

AnisotropyMap AnisotropyMap::identity(std::size_t n) {
  return {std::vector<double>(n, 1.0)};
}

nlohmann::json AnisotropyMap::to_json() const { return {{"scale", scale}}; }

AnisotropyMap AnisotropyMap::from_json(const nlohmann::json& j) {
  return {j.at("scale").get<std::vector<double>>()};
}

AnisotropyBuild build_anisotropy(const std::vector<ConfigPoint>& points,
                                 const std::vector<double>& values,
                                 const AnisotropyOptions& options) {
  if (points.size() < 2) throw std::invalid_argument("build_anisotropy: need at least 2 points");
  const std::size_t n = points[0].size();

  AnisotropyBuild out;
  out.sigma0.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double mean = 0.0;
    for (const auto& p : points) mean += p[j];
    mean /= static_cast<double>(points.size());
    double var = 0.0;
    for (const auto& p : points) var += (p[j] - mean) * (p[j] - mean);
    var /= static_cast<double>(points.size() - 1);
    out.sigma0[j] = std::sqrt(var);
    if (!(out.sigma0[j] > 0.0))
      throw std::runtime_error("build_anisotropy: sample does not span dimension " +
                               std::to_string(j));
  }

  std::vector<ConfigPoint> prescaled(points.size(), ConfigPoint(n));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) prescaled[i][j] = points[i][j] / out.sigma0[j];

  ConfigPoint lo = prescaled[0], hi = prescaled[0];
  for (const auto& p : prescaled)
    for (std::size_t j = 0; j < n; ++j) {
      lo[j] = std::min(lo[j], p[j]);
      hi[j] = std::max(hi[j], p[j]);
    }
  double diam = 0.0;
  for (std::size_t j = 0; j < n; ++j) diam += (hi[j] - lo[j]) * (hi[j] - lo[j]);
  diam = std::sqrt(diam);

  FitOptions fopt;
  fopt.shape = options.shape;
  fopt.fixed_nugget = options.fixed_nugget;
  fopt.weighting = options.weighting;
  fopt.max_range = diam;

  out.directional.reserve(n);
  out.map.scale.assign(n, 1.0);
  // ranges below the bin resolution are not identifiable; flooring them keeps
  // a flat (noise-dominated) direction from collapsing the scale
  const double bin_width = kBinnedDiameterFraction * diam / static_cast<double>(kDirectionalBins);
  for (std::size_t axis = 0; axis < n; ++axis) {
    try {
      auto emp = directional_variogram(prescaled, values, axis, options.angular_tolerance_deg,
                                       kDirectionalBins, kBinnedDiameterFraction * diam);
      out.directional.push_back(fit(emp, fopt));
    } catch (const std::exception& e) {
      throw std::runtime_error("directional fit failed on axis " + std::to_string(axis) + ": " +
                               e.what());
    }
    out.directional.back().range = std::max(out.directional.back().range, bin_width);
    out.map.scale[axis] = out.directional.back().range * out.sigma0[axis];
  }

  double min_sill = std::numeric_limits<double>::infinity(), max_sill = 0.0;
  double max_nugget_ratio = 0.0;
  for (const auto& m : out.directional) {
    min_sill = std::min(min_sill, m.sill);
    max_sill = std::max(max_sill, m.sill);
    if (m.sill > 0.0) max_nugget_ratio = std::max(max_nugget_ratio, m.nugget / m.sill);
  }
  if (max_sill > 1.5 * min_sill) {
    out.sanity.sill_spread_flag = true;
    out.sanity.message += "directional sills differ by more than 50%; ";
  }
  if (!options.fixed_nugget.has_value() && max_nugget_ratio > 0.25) {
    out.sanity.nugget_flag = true;
    out.sanity.message += "directional nugget exceeds 25% of sill; ";
  }
  return out;
}

}  // namespace gpival
