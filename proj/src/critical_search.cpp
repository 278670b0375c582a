#include "gpival/critical_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "gpival/normal.hpp"
#include "gpival/sampling.hpp"

namespace gpival {

DeltaMeasure::DeltaMeasure(VariogramModel v, double p) : variogram(v), sensitivity(p) {
  if (!(p > 0.0 && p < 0.5))
    throw std::invalid_argument("delta measure: sensitivity must be in (0, 0.5)");
  abs_quantile_ = std::fabs(normal_quantile(p));
  gamma_at_range_ = eval_model(variogram, variogram.range);
}

double DeltaMeasure::operator()(double l) const {
  if (l < 0.0) throw std::invalid_argument("delta measure: l must be >= 0");
  // target semivariance for a crossing with probability p at distance l
  double u = 0.5 * (l / abs_quantile_) * (l / abs_quantile_);
  if (u <= variogram.nugget) return 0.0;
  if (u >= gamma_at_range_) return variogram.range;
  return std::min(inverse_model(variogram, u), variogram.range);
}

void SearchParams::validate() const {
  if (!(t_lower < t_upper)) throw std::invalid_argument("search params: t_lower must be < t_upper");
  if (!(sensitivity > 0.0 && sensitivity < 0.5))
    throw std::invalid_argument("search params: sensitivity must be in (0, 0.5)");
  if (repulsion < 0.0 || repulsion > 1.0)
    throw std::invalid_argument("search params: repulsion must be in [0, 1]");
  if (iterations < 1) throw std::invalid_argument("search params: iterations must be >= 1");
  if (cap_min > cap_max) throw std::invalid_argument("search params: cap_min must be <= cap_max");
  if (report_floor < 0.0 || report_floor > 1.0)
    throw std::invalid_argument("search params: report floor must be in [0, 1]");
}

std::size_t required_sample_size(const GpiModel& model, const SearchParams& params) {
  params.validate();
  if (model.sample().size() == 0) throw std::invalid_argument("required_sample_size: empty sample");

  double lbar = 0.0;
  for (double z : model.sample().values)
    lbar += std::min(std::fabs(z - params.t_lower), std::fabs(z - params.t_upper));
  lbar /= static_cast<double>(model.sample().size());

  DeltaMeasure delta(model.variogram(), params.sensitivity);
  double d = delta(lbar);
  if (d <= 0.0) return params.cap_max;  // everywhere-critical domain

  const auto& space = model.space();
  if (!space) throw std::invalid_argument("required_sample_size: model carries no space");
  double count = 1.0;
  for (std::size_t i = 0; i < space->dimension_count(); ++i) {
    double extent =
        (space->dimension(i).upper - space->dimension(i).lower) / model.anisotropy().scale[i];
    count *= std::ceil(extent / d);
    if (count >= static_cast<double>(params.cap_max)) return params.cap_max;
  }
  auto nu = static_cast<std::size_t>(count);
  return std::clamp(nu, params.cap_min, params.cap_max);
}

SearchResult search(std::vector<ConfigPoint> population, const BatchPredictor& f,
                    const SearchParams& params, const DeltaMeasure& delta,
                    const std::vector<double>& box_lower, const std::vector<double>& box_upper) {
  params.validate();
  if (population.empty()) throw std::invalid_argument("search: empty population");
  const std::size_t n = population[0].size();
  const double t0 = 0.5 * (params.t_lower + params.t_upper);

  std::vector<double> values = f(population);

  std::vector<ConfigPoint> candidates;
  for (std::size_t k = 1; k <= params.iterations; ++k) {
    double alpha = 1.0 / (2.0 * static_cast<double>(k));
    for (std::size_t j = 0; j < population.size(); ++j) {
      const ConfigPoint& xj = population[j];
      double zj = values[j];
      double d, s;
      if (zj > t0) {
        d = (zj > params.t_upper) ? alpha * delta(zj - params.t_upper)
                                  : 2.0 * alpha * delta(params.t_upper - zj);
        s = 1.0;
      } else {
        d = (zj < params.t_lower) ? alpha * delta(params.t_lower - zj)
                                  : 2.0 * alpha * delta(zj - params.t_lower);
        s = -1.0;
      }

      candidates.clear();
      for (std::size_t i = 0; i < n; ++i) {
        for (double sign : {1.0, -1.0}) {
          ConfigPoint c = xj;
          c[i] = std::clamp(c[i] + sign * d, box_lower[i], box_upper[i]);
          candidates.push_back(std::move(c));
        }
      }
      std::vector<double> zc = f(candidates);

      double best_score = -std::numeric_limits<double>::infinity();
      std::size_t best = 0;  // index into {xj} + candidates
      double best_value = zj;
      for (std::size_t c = 0; c < candidates.size() + 1; ++c) {
        const ConfigPoint& cand = (c == 0) ? xj : candidates[c - 1];
        double zcand = (c == 0) ? zj : zc[c - 1];
        // min distance to the rest of the current population; a singleton
        // population has no repulsion partner
        double dmin2 = 1.0;
        if (population.size() > 1) {
          dmin2 = std::numeric_limits<double>::infinity();
          for (std::size_t t = 0; t < population.size(); ++t) {
            if (t == j) continue;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
              double dd = cand[i] - population[t][i];
              acc += dd * dd;
            }
            dmin2 = std::min(dmin2, acc);
          }
        }
        double dmin = std::sqrt(dmin2);
        double score = s * (zcand - t0) * std::pow(dmin, params.repulsion / 2.0);
        if (score > best_score) {
          best_score = score;
          best = c;
          best_value = zcand;
        }
      }
      if (best > 0) {
        population[j] = candidates[best - 1];
        values[j] = best_value;
      }
    }
  }
  return {std::move(population), std::move(values)};
}

SearchResult search(std::vector<ConfigPoint> population,
                    const std::function<double(const ConfigPoint&)>& f, const SearchParams& params,
                    const DeltaMeasure& delta, const std::vector<double>& box_lower,
                    const std::vector<double>& box_upper) {
  BatchPredictor batch = [&f](const std::vector<ConfigPoint>& pts) {
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(f(p));
    return out;
  };
  return search(std::move(population), batch, params, delta, box_lower, box_upper);
}

double exceedance_probability(double mean, double std_dev, double t_lower, double t_upper) {
  if (std_dev <= 0.0) return (mean < t_lower || mean > t_upper) ? 1.0 : 0.0;
  double p = normal_cdf((t_lower - mean) / std_dev) + normal_cdf((mean - t_upper) / std_dev);
  return std::min(p, 1.0);
}

FilterResult filter(const std::vector<ConfigPoint>& population,
                    const std::function<std::pair<double, double>(const ConfigPoint&)>& f,
                    double t_lower, double t_upper, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("filter: p must be in (0, 1)");
  double a = normal_quantile(p);
  FilterResult out;
  for (std::size_t i = 0; i < population.size(); ++i) {
    auto [mu, sigma] = f(population[i]);
    if (sigma <= 0.0) {
      // limit semantics: indicator classification
      if (mu < t_lower)
        out.lower.push_back(i);
      else if (mu > t_upper)
        out.upper.push_back(i);
      else {
        out.middle.push_back(i);
        out.probabilities.push_back(0.0);
      }
      continue;
    }
    if (mu < t_lower && a <= (t_lower - mu) / sigma) {
      out.lower.push_back(i);
    } else if (mu > t_upper && a <= (mu - t_upper) / sigma) {
      out.upper.push_back(i);
    } else {
      out.middle.push_back(i);
      out.probabilities.push_back(exceedance_probability(mu, sigma, t_lower, t_upper));
    }
  }
  return out;
}

nlohmann::json CriticalReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"point", r.point},
                         {"source", r.source},
                         {"predicted_deviation_dB", r.predicted_deviation},
                         {"model_error_dB", r.model_error},
                         {"failure_probability", r.probability}});
  return {{"format_version", 1}, {"rows", rows_json}};
}

CriticalReport CriticalReport::from_json(const nlohmann::json& j) {
  CriticalReport rep;
  for (const auto& rj : j.at("rows"))
    rep.rows.push_back({rj.at("point").get<ConfigPoint>(), rj.value("source", std::string{}),
                        rj.at("predicted_deviation_dB").get<double>(),
                        rj.at("model_error_dB").get<double>(),
                        rj.at("failure_probability").get<double>()});
  return rep;
}

CriticalReport run_critical_search(const GpiModel& model, const SearchParams& params,
                                   std::uint64_t seed) {
  params.validate();
  const auto& space = model.space();
  if (!space) throw std::invalid_argument("run_critical_search: model carries no space");
  const std::size_t n = space->dimension_count();

  std::size_t nu = required_sample_size(model, params);

  // LHS population over X mapped into the isotropic image
  auto unit = lhs_unit(std::max<std::size_t>(nu, 2), n, seed);
  auto lo = space->lower_bounds();
  auto hi = space->upper_bounds();
  const auto& scale = model.anisotropy().scale;
  std::vector<ConfigPoint> population(unit.size(), ConfigPoint(n));
  std::vector<double> box_lo(n), box_hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    box_lo[i] = lo[i] / scale[i];
    box_hi[i] = hi[i] / scale[i];
  }
  for (std::size_t p = 0; p < unit.size(); ++p)
    for (std::size_t i = 0; i < n; ++i)
      population[p][i] = (lo[i] + unit[p][i] * (hi[i] - lo[i])) / scale[i];

  DeltaMeasure delta(model.variogram(), params.sensitivity);
  BatchPredictor mean_f = [&model](const std::vector<ConfigPoint>& pts) {
    return model.krige_mean_batch(pts);
  };
  SearchResult searched = search(std::move(population), mean_f, params, delta, box_lo, box_hi);

  // snap to measurable configurations, drop unsnappable, dedupe
  std::vector<ConfigPoint> snapped;
  std::vector<std::string> sources;
  std::set<ConfigPoint> seen;
  for (const auto& p_iso : searched.points) {
    ConfigPoint x = model.anisotropy().inverse(p_iso);
    auto snap = snap_nearest(x, *space);
    if (!snap.has_value()) continue;
    if (!seen.insert(snap->point).second) continue;
    snapped.push_back(snap->point);
    sources.push_back(snap->source != nullptr ? snap->source->name : std::string{});
  }

  // final kriging round, then the probability filter on the snapped
  // configurations; near-certain exceedances (L/U) are always reported
  std::vector<Prediction> preds(snapped.size());
  for (std::size_t i = 0; i < snapped.size(); ++i) preds[i] = model.krige(snapped[i]);
  std::size_t cursor = 0;
  auto mean_std = [&](const ConfigPoint&) {
    const Prediction& p = preds[cursor++];
    return std::make_pair(p.mean, p.inflated_std);
  };
  double p_confident = std::clamp(1.0 - params.report_floor, 0.5 + 1e-9, 1.0 - 1e-12);
  FilterResult classes = filter(snapped, mean_std, params.t_lower, params.t_upper, p_confident);

  CriticalReport report;
  auto add_row = [&](std::size_t i, double prob) {
    if (prob >= params.report_floor)
      report.rows.push_back({snapped[i], sources[i], preds[i].mean, preds[i].inflated_std, prob});
  };
  for (std::size_t i : classes.lower)
    add_row(i, exceedance_probability(preds[i].mean, preds[i].inflated_std, params.t_lower,
                                      params.t_upper));
  for (std::size_t i : classes.upper)
    add_row(i, exceedance_probability(preds[i].mean, preds[i].inflated_std, params.t_lower,
                                      params.t_upper));
  for (std::size_t m = 0; m < classes.middle.size(); ++m)
    add_row(classes.middle[m], classes.probabilities[m]);

  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const CriticalRow& a, const CriticalRow& b) {
                     return a.probability > b.probability;
                   });
  return report;
}

}  // namespace gpival
