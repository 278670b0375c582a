#include "gpival/kriging.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpival {

void ValuedSample::validate() const {
  if (points.size() != values.size())
    throw std::invalid_argument("valued sample: points/values size mismatch");
  if (!ids.empty() && ids.size() != points.size())
    throw std::invalid_argument("valued sample: ids size mismatch");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j])
        throw std::invalid_argument("valued sample: duplicate points at indices " +
                                    std::to_string(i) + " and " + std::to_string(j));
}

nlohmann::json ValuedSample::to_json() const {
  return {{"points", points}, {"values", values}, {"ids", ids}};
}

ValuedSample ValuedSample::from_json(const nlohmann::json& j) {
  ValuedSample s;
  s.points = j.at("points").get<std::vector<ConfigPoint>>();
  s.values = j.at("values").get<std::vector<double>>();
  s.ids = j.value("ids", std::vector<std::string>{});
  return s;
}

GpiModel::GpiModel(ValuedSample sample, AnisotropyMap anisotropy, VariogramModel variogram,
                   double fit_nrmse, std::shared_ptr<const ConfigSpace> space)
    : sample_(std::move(sample)),
      anisotropy_(std::move(anisotropy)),
      variogram_(variogram),
      fit_nrmse_(fit_nrmse),
      space_(std::move(space)) {
  sample_.validate();
  if (sample_.size() == 0) throw std::invalid_argument("GpiModel: empty sample");
  if (fit_nrmse_ < 0.0) throw std::invalid_argument("GpiModel: fit_nrmse must be >= 0");

  const std::size_t k = sample_.size();
  const std::size_t n = sample_.points[0].size();
  if (anisotropy_.dims() != n) throw std::invalid_argument("GpiModel: anisotropy dimension mismatch");

  iso_points_.reserve(k);
  for (const auto& p : sample_.points) {
    ConfigPoint t = anisotropy_.transform(p);
    iso_points_.push_back(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<long>(n)));
  }

  // Tiny off-diagonal jitter keeps gaussian-shape systems well conditioned
  // without touching exactness at the sample points (rhs at lag 0 stays 0).
  jitter_ = 1e-10 * (variogram_.nugget + variogram_.sill);

  double min_dist = std::numeric_limits<double>::infinity();
  double max_dist = 0.0;
  std::size_t near_i = 0, near_j = std::min<std::size_t>(1, k - 1);
  gamma_.resize(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    gamma_(i, i) = 0.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      double h = (iso_points_[i] - iso_points_[j]).norm();
      if (h < min_dist) {
        min_dist = h;
        near_i = i;
        near_j = j;
      }
      max_dist = std::max(max_dist, h);
      double g = eval_model(variogram_, h) + jitter_;
      gamma_(i, j) = g;
      gamma_(j, i) = g;
    }
  }

  auto id_of = [&](std::size_t i) {
    return sample_.ids.empty() ? std::to_string(i) : sample_.ids[i];
  };
  auto duplicate_error = [&]() {
    throw std::runtime_error("kriging matrix is singular; nearest point pair: " + id_of(near_i) +
                             " and " + id_of(near_j) + " at isotropic distance " +
                             std::to_string(min_dist));
  };
  if (k > 1 && min_dist <= 1e-12 * max_dist) duplicate_error();

  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(k + 1, k + 1);
  aug.topLeftCorner(k, k) = gamma_;
  aug.row(k).head(k).setOnes();
  aug.col(k).head(k).setOnes();
  lu_.compute(aug);

  double min_pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  double max_pivot = lu_.matrixLU().diagonal().cwiseAbs().maxCoeff();
  if (min_pivot < 1e-12 * std::max(max_pivot, 1.0)) duplicate_error();
}

GpiModel::GpiModel(GpiModel&& other) noexcept
    : sample_(std::move(other.sample_)),
      anisotropy_(std::move(other.anisotropy_)),
      variogram_(other.variogram_),
      fit_nrmse_(other.fit_nrmse_),
      space_(std::move(other.space_)),
      empirical_(std::move(other.empirical_)),
      iso_points_(std::move(other.iso_points_)),
      gamma_(std::move(other.gamma_)),
      lu_(std::move(other.lu_)),
      jitter_(other.jitter_),
      clamp_count_(other.clamp_count_.load()) {}

GpiModel& GpiModel::operator=(GpiModel&& other) noexcept {
  sample_ = std::move(other.sample_);
  anisotropy_ = std::move(other.anisotropy_);
  variogram_ = other.variogram_;
  fit_nrmse_ = other.fit_nrmse_;
  space_ = std::move(other.space_);
  empirical_ = std::move(other.empirical_);
  iso_points_ = std::move(other.iso_points_);
  gamma_ = std::move(other.gamma_);
  lu_ = std::move(other.lu_);
  jitter_ = other.jitter_;
  clamp_count_.store(other.clamp_count_.load());
  return *this;
}

Eigen::VectorXd GpiModel::rhs_for(const Eigen::VectorXd& x_iso) const {
  const std::size_t k = sample_.size();
  Eigen::VectorXd b(k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    double h = (iso_points_[i] - x_iso).norm();
    b(i) = (h == 0.0) ? 0.0 : eval_model(variogram_, h) + jitter_;
  }
  b(k) = 1.0;
  return b;
}

Prediction GpiModel::predict(const Eigen::VectorXd& x_iso) const {
  const std::size_t k = sample_.size();
  Eigen::VectorXd b = rhs_for(x_iso);
  Eigen::VectorXd sol = lu_.solve(b);
  Eigen::VectorXd w = sol.head(k);

  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) mean += w(i) * sample_.values[i];

  // estimator variance: 2 w.g0 - w' Gamma w
  double var = 2.0 * w.dot(b.head(k)) - w.dot(gamma_ * w);
  if (var < 0.0) {
    clamp_count_.fetch_add(1, std::memory_order_relaxed);
    var = 0.0;
  }
  Prediction out;
  out.mean = mean;
  out.kriging_std = std::sqrt(var);
  out.inflated_std = out.kriging_std * (1.0 + fit_nrmse_);
  return out;
}

Prediction GpiModel::krige(const ConfigPoint& x) const {
  ConfigPoint t = anisotropy_.transform(x);
  return predict(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<long>(t.size())));
}

Prediction GpiModel::krige_iso(const Eigen::VectorXd& x_iso) const { return predict(x_iso); }

std::vector<double> GpiModel::krige_mean_batch(const std::vector<ConfigPoint>& points_iso) const {
  const std::size_t k = sample_.size();
  const std::size_t m = points_iso.size();
  Eigen::MatrixXd rhs(k + 1, m);
  for (std::size_t c = 0; c < m; ++c) {
    Eigen::Map<const Eigen::VectorXd> x(points_iso[c].data(),
                                        static_cast<long>(points_iso[c].size()));
    rhs.col(c) = rhs_for(x);
  }
  Eigen::MatrixXd sol = lu_.solve(rhs);
  Eigen::Map<const Eigen::VectorXd> z(sample_.values.data(), static_cast<long>(k));
  std::vector<double> out(m);
  for (std::size_t c = 0; c < m; ++c) out[c] = sol.col(c).head(k).dot(z);
  return out;
}

Eigen::VectorXd GpiModel::kriging_weights(const ConfigPoint& x) const {
  ConfigPoint t = anisotropy_.transform(x);
  Eigen::VectorXd b =
      rhs_for(Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<long>(t.size())));
  return lu_.solve(b).head(sample_.size());
}

std::vector<double> GpiModel::standardized_residuals(const ValuedSample& test) const {
  test.validate();
  std::vector<double> out;
  out.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    Prediction p = krige(test.points[i]);
    if (p.inflated_std == 0.0) {
      std::string id = test.ids.empty() ? std::to_string(i) : test.ids[i];
      throw std::runtime_error("standardized residual undefined (zero error) at test point " + id);
    }
    out.push_back((test.values[i] - p.mean) / p.inflated_std);
  }
  return out;
}

nlohmann::json GpiModel::to_json() const {
  nlohmann::json j;
  j["format_version"] = 1;
  j["sample"] = sample_.to_json();
  j["anisotropy"] = anisotropy_.to_json();
  j["variogram"] = variogram_.to_json();
  j["fit_nrmse"] = fit_nrmse_;
  if (empirical_.has_value()) j["empirical_variogram"] = empirical_->to_json();
  if (space_) j["space"] = space_->to_json();
  return j;
}

GpiModel GpiModel::from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != 1)
    throw std::invalid_argument("gpi model: unsupported format_version");
  std::shared_ptr<const ConfigSpace> space;
  if (j.contains("space"))
    space = std::make_shared<const ConfigSpace>(ConfigSpace::from_json(j.at("space")));
  GpiModel m(ValuedSample::from_json(j.at("sample")), AnisotropyMap::from_json(j.at("anisotropy")),
             VariogramModel::from_json(j.at("variogram")), j.at("fit_nrmse").get<double>(), space);
  if (j.contains("empirical_variogram"))
    m.attach_empirical(EmpiricalVariogram::from_json(j.at("empirical_variogram")));
  return m;
}

}  // namespace gpival
