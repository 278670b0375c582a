#include "gpival/oracle_fields.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "gpival/normal.hpp"

namespace gpival {

double sine_wave(double x0, double x1) {
  double y = std::sqrt(x0 * x0 + x1 * x1) / std::sqrt(2.0);
  return y * std::sin(2.0 * M_PI * y);
}

OracleField::OracleField(std::shared_ptr<const ConfigSpace> space,
                         std::function<double(const ConfigPoint&)> deterministic, double noise_std,
                         std::uint64_t seed)
    : space_(std::move(space)), det_(std::move(deterministic)), noise_std_(noise_std), seed_(seed) {
  if (noise_std_ < 0.0) throw std::invalid_argument("oracle field: noise std must be >= 0");
}

namespace {

std::uint64_t hash_point(const ConfigPoint& p, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ULL);
  for (double c : p) {
    std::uint64_t bits;
    std::memcpy(&bits, &c, sizeof(bits));
    h = splitmix64(h ^ bits);
  }
  return h;
}

}  // namespace

double OracleField::operator()(const ConfigPoint& p) const {
  double v = det_(p);
  if (noise_std_ == 0.0) return v;
  // order-independent noise: one normal draw keyed by (point, seed)
  std::uint64_t h = hash_point(p, seed_);
  double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
  return v + noise_std_ * normal_quantile(u);
}

OracleField sine_wave_field(std::uint64_t seed, double noise_std) {
  auto space = std::make_shared<const ConfigSpace>(
      make_box_space("unit-square", {{"x0", 0.0, 1.0}, {"x1", 0.0, 1.0}}));
  return OracleField(
      space, [](const ConfigPoint& p) { return sine_wave(p[0], p[1]); }, noise_std, seed);
}

bool SyntheticDevice::in_pocket(const ConfigPoint& p) const {
  if (pocket_radius <= 0.0) return false;
  const auto& space = *field.space();
  int fi = space.dimension_index("f_MHz");
  int si = space.dimension_index("s_mm");
  auto norm = [&](int d, double v) {
    const Dimension& dim = space.dimension(d);
    return (v - dim.lower) / (dim.upper - dim.lower);
  };
  double df = norm(fi, p[fi]) - pocket_f;
  double ds = norm(si, p[si]) - pocket_s;
  return df * df + ds * ds <= pocket_radius * pocket_radius;
}

SyntheticDevice synthetic_device(DeviceProfile profile, std::uint64_t seed) {
  auto space = std::make_shared<const ConfigSpace>(build_sar_array_space());
  const std::size_t n = space->dimension_count();

  // smooth anisotropic base: per-dimension cosine mix in normalized coordinates
  Rng rng(splitmix64(seed ^ 0x9d2c5680ca876ccdULL));
  std::vector<double> freq(n), phase(n), coef(n);
  double coef_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    freq[i] = rng.uniform(0.75, 1.5);
    phase[i] = rng.uniform(0.0, 2.0 * M_PI);
    coef[i] = rng.uniform(0.5, 1.0);
    coef_sum += coef[i];
  }

  double amplitude = 0.0, noise = 0.0;
  switch (profile) {
    case DeviceProfile::structured:
    case DeviceProfile::injected_fault:
      amplitude = 0.8;   // dB, comfortably inside the MPE band
      noise = 0.04;      // sill well above the nugget
      break;
    case DeviceProfile::noisy:
      amplitude = 0.15;  // flat surface, noise-dominated
      noise = 0.25;
      break;
  }

  auto lo = space->lower_bounds();
  auto hi = space->upper_bounds();
  auto base = [=](const ConfigPoint& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double u = (p[i] - lo[i]) / (hi[i] - lo[i]);
      acc += coef[i] * std::cos(2.0 * M_PI * freq[i] * u + phase[i]);
    }
    return amplitude * acc / coef_sum;
  };

  SyntheticDevice dev{OracleField(space, base, noise, seed)};
  if (profile != DeviceProfile::injected_fault) return dev;

  // fault pocket over the (f, s) plane, constant along the other dimensions;
  // anchored at a seeded measurable (frequency, distance) pair away from the
  // band edges so the pocket always contains real configurations. The top
  // distance (25 mm) is excluded: floor-snapping gives it a near-zero
  // catchment, so an initial sample carries no information there.
  Rng prng(splitmix64(seed ^ 0x853c49e6748fea9bULL));
  std::vector<std::pair<double, double>> anchors;
  for (const auto& src : space->sources())
    for (const auto& e : src.entries)
      if (e.f_mhz >= 1450.0 && e.f_mhz <= 4600.0 && e.s_mm < 25.0)
        anchors.emplace_back(e.f_mhz, e.s_mm);
  auto [f_anchor, s_anchor] = anchors[prng.below(anchors.size())];
  int fi0 = space->dimension_index("f_MHz");
  int si0 = space->dimension_index("s_mm");
  auto lo0 = space->lower_bounds();
  auto hi0 = space->upper_bounds();
  double cf = (f_anchor - lo0[fi0]) / (hi0[fi0] - lo0[fi0]);
  double cs = (s_anchor - lo0[si0]) / (hi0[si0] - lo0[si0]);
  const double width = 0.18;
  const double bump_amp = 2.6;
  auto faulted = [=](const ConfigPoint& p) {
    double uf = (p[fi0] - lo[fi0]) / (hi[fi0] - lo[fi0]);
    double us = (p[si0] - lo[si0]) / (hi[si0] - lo[si0]);
    double d2 = (uf - cf) * (uf - cf) + (us - cs) * (us - cs);
    return base(p) + bump_amp * std::exp(-0.5 * d2 / (width * width));
  };
  dev.field = OracleField(space, faulted, noise, seed);
  dev.pocket_f = cf;
  dev.pocket_s = cs;
  dev.pocket_radius = width * std::sqrt(2.0 * std::log(2.0));  // half-height core
  return dev;
}

GridOracle grid_oracle(const OracleField& field, std::size_t resolution, double t_lower,
                       double t_upper) {
  const auto& space = *field.space();
  const std::size_t n = space.dimension_count();
  if (n > 3) throw std::invalid_argument("grid_oracle: dimension too high for a dense grid");
  if (resolution < 2) throw std::invalid_argument("grid_oracle: resolution must be >= 2");

  auto lo = space.lower_bounds();
  auto hi = space.upper_bounds();
  GridOracle out;
  out.min_value = std::numeric_limits<double>::infinity();
  out.max_value = -std::numeric_limits<double>::infinity();

  std::vector<std::size_t> idx(n, 0);
  ConfigPoint p(n);
  bool done = false;
  while (!done) {
    for (std::size_t i = 0; i < n; ++i)
      p[i] = lo[i] + (hi[i] - lo[i]) * static_cast<double>(idx[i]) /
                         static_cast<double>(resolution - 1);
    double v = field.deterministic(p);
    if (v < out.min_value) {
      out.min_value = v;
      out.argmin = p;
    }
    if (v > out.max_value) {
      out.max_value = v;
      out.argmax = p;
    }
    if (v <= t_lower) out.sublevel.push_back(p);
    if (v >= t_upper) out.superlevel.push_back(p);

    std::size_t d = 0;
    while (d < n && ++idx[d] == resolution) {
      idx[d] = 0;
      ++d;
    }
    done = (d == n);
  }
  return out;
}

std::vector<double> draw_gaussian_process(const std::vector<ConfigPoint>& points,
                                          const VariogramModel& model, const AnisotropyMap& metric,
                                          std::uint64_t seed) {
  const std::size_t k = points.size();
  if (k == 0) return {};
  // covariance of the smooth component: sill - (gamma - nugget) at h > 0
  Eigen::MatrixXd cov(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    cov(i, i) = model.sill;
    for (std::size_t j = i + 1; j < k; ++j) {
      double h = metric.distance(points[i], points[j]);
      double smooth = (h == 0.0) ? 0.0 : eval_model(model, h) - model.nugget;
      double c = model.sill - smooth;
      cov(i, j) = c;
      cov(j, i) = c;
    }
  }
  cov.diagonal().array() += 1e-10 * model.sill;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("draw_gaussian_process: covariance not positive definite");

  Rng rng(seed);
  Eigen::VectorXd g(k);
  for (std::size_t i = 0; i < k; ++i) g(i) = rng.normal();
  Eigen::VectorXd smooth = llt.matrixL() * g;

  double noise_std = std::sqrt(model.nugget);
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i)
    out[i] = smooth(i) + (noise_std > 0.0 ? noise_std * rng.normal() : 0.0);
  return out;
}

}  // namespace gpival
