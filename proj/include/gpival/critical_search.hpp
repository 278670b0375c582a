#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpival/kriging.hpp"

namespace gpival {

// Smallest isotropic lag at which the process has probability >= p of
// crossing a threshold that lies at distance l from the known value.
// Continuous, monotone in l, bounded by the variogram range.
struct DeltaMeasure {
  VariogramModel variogram;
  double sensitivity = 0.1;  // p, strictly inside (0, 0.5)

  DeltaMeasure(VariogramModel v, double p);
  double operator()(double l) const;

 private:
  double abs_quantile_;      // |Phi^-1(p)|
  double gamma_at_range_;    // eval_model(variogram, range)
};

struct SearchParams {
  double t_lower = -1.0;
  double t_upper = 1.0;
  double sensitivity = 0.1;  // p for the delta measure and population sizing
  double repulsion = 0.1;    // q in [0, 1]
  std::size_t iterations = 8;
  std::size_t cap_min = 10;
  std::size_t cap_max = 1000;
  double report_floor = 0.05;

  void validate() const;
};

// Initial population size: product over dimensions of
// ceil(extent_i / delta_p(mean threshold distance)), on iota-transformed
// extents, clamped to [cap_min, cap_max].
std::size_t required_sample_size(const GpiModel& model, const SearchParams& params);

// Trajectory search. Points and the box live in the isotropic image of X;
// f maps an isotropic point to the predicted value. Candidates outside the
// box are clipped to the boundary. Deterministic.
struct SearchResult {
  std::vector<ConfigPoint> points;  // isotropic coordinates
  std::vector<double> values;
};
using BatchPredictor = std::function<std::vector<double>(const std::vector<ConfigPoint>&)>;

SearchResult search(std::vector<ConfigPoint> population, const BatchPredictor& f,
                    const SearchParams& params, const DeltaMeasure& delta,
                    const std::vector<double>& box_lower, const std::vector<double>& box_upper);

// Convenience overload for plain scalar predictors.
SearchResult search(std::vector<ConfigPoint> population,
                    const std::function<double(const ConfigPoint&)>& f, const SearchParams& params,
                    const DeltaMeasure& delta, const std::vector<double>& box_lower,
                    const std::vector<double>& box_upper);

// Classification of a population by threshold-crossing probability given a
// predictor returning (mean, std). L: below t_lower with confidence >= p;
// U: above t_upper likewise; M: the rest, with exceedance probabilities.
struct FilterResult {
  std::vector<std::size_t> lower;   // indices into the input population
  std::vector<std::size_t> upper;
  std::vector<std::size_t> middle;
  std::vector<double> probabilities;  // one per middle element
};
FilterResult filter(const std::vector<ConfigPoint>& population,
                    const std::function<std::pair<double, double>(const ConfigPoint&)>& f,
                    double t_lower, double t_upper, double p);

// Exceedance probability min(Phi((T- - mu)/sigma) + Phi((mu - T+)/sigma), 1)
// with indicator semantics at sigma = 0.
double exceedance_probability(double mean, double std_dev, double t_lower, double t_upper);

struct CriticalRow {
  ConfigPoint point;          // snapped, domain units
  std::string source;         // antenna name; empty for source-free spaces
  double predicted_deviation; // dB
  double model_error;         // inflated std, dB
  double probability;         // failure probability
};

struct CriticalReport {
  std::vector<CriticalRow> rows;  // sorted by descending probability

  nlohmann::json to_json() const;
  static CriticalReport from_json(const nlohmann::json& j);
};

// Step 3 end to end: sized LHS population, trajectory search on the kriged
// mean, nearest-snapping, a final kriging round, and the probability filter.
// The model must carry its configuration space.
CriticalReport run_critical_search(const GpiModel& model, const SearchParams& params,
                                   std::uint64_t seed);

}  // namespace gpival
