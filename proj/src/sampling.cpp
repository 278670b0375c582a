#include "gpival/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gpival/normal.hpp"

namespace gpival {

namespace {

// squared minimal pairwise distance of a Latin grid, in case-index units
double min_case_dist2(const std::vector<std::vector<std::size_t>>& rows, std::size_t k,
                      std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double d = static_cast<double>(rows[j][a]) - static_cast<double>(rows[j][b]);
        d2 += d * d;
      }
      if (d2 < best) best = d2;
    }
  }
  return best;
}

}  // namespace

std::vector<ConfigPoint> lhs_unit(std::size_t k, std::size_t n, std::uint64_t seed,
                                  std::size_t budget) {
  if (k < 2) throw std::invalid_argument("lhs_unit: k must be >= 2");
  if (n < 1) throw std::invalid_argument("lhs_unit: n must be >= 1");
  Rng rng(seed);

  std::vector<std::vector<std::size_t>> best;
  double best_d2 = -1.0;
  for (std::size_t c = 0; c < std::max<std::size_t>(budget, 1); ++c) {
    std::vector<std::vector<std::size_t>> rows(n);
    for (std::size_t j = 0; j < n; ++j) rows[j] = rng.permutation(k);
    double d2 = min_case_dist2(rows, k, n);
    if (d2 > best_d2) {
      best_d2 = d2;
      best = std::move(rows);
    }
  }

  std::vector<ConfigPoint> pts(k, ConfigPoint(n));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j)
      pts[i][j] = (static_cast<double>(best[j][i]) + rng.uniform()) / static_cast<double>(k);
  return pts;
}

std::vector<std::pair<double, double>> index_domain(const ConfigSpace& space, std::size_t k) {
  if (k < 2) throw std::invalid_argument("index_domain: k must be >= 2");
  std::vector<std::pair<double, double>> out;
  out.reserve(space.dimension_count());
  for (const auto& d : space.dimensions()) {
    switch (d.treatment) {
      case Treatment::continuous:
        out.emplace_back(d.lower, d.upper);
        break;
      case Treatment::discrete_raster:
        out.emplace_back(d.lower, d.upper + (d.upper - d.lower) / static_cast<double>(k));
        break;
      case Treatment::index_based:
        out.emplace_back(0.0, static_cast<double>(kPowerSteps) + 1.0);
        break;
    }
  }
  return out;
}

namespace {

struct LhsState {
  std::vector<std::vector<std::size_t>> rows;  // [dim][point] case index
  std::vector<ConfigPoint> unit;               // within-[0,1] coordinates
  std::size_t k, n;
};

LhsState lhs_state(std::size_t k, std::size_t n, std::uint64_t seed, Rng& rng) {
  LhsState st;
  st.k = k;
  st.n = n;
  auto pts = lhs_unit(k, n, seed);
  st.unit = pts;
  st.rows.assign(n, std::vector<std::size_t>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j)
      st.rows[j][i] = static_cast<std::size_t>(pts[i][j] * static_cast<double>(k));
  (void)rng;
  return st;
}

ConfigPoint map_and_snap(const LhsState& st, std::size_t i,
                         const std::vector<std::pair<double, double>>& J,
                         const ConfigSpace& space) {
  ConfigPoint p(st.n);
  for (std::size_t j = 0; j < st.n; ++j)
    p[j] = J[j].first + st.unit[i][j] * (J[j].second - J[j].first);
  return snap_floor(p, space);
}

bool equal_point(const ConfigPoint& a, const ConfigPoint& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

bool collides(const ConfigPoint& p, const std::vector<ConfigPoint>& set, std::size_t skip) {
  for (std::size_t i = 0; i < set.size(); ++i)
    if (i != skip && equal_point(p, set[i])) return true;
  return false;
}

constexpr int kMaxRetries = 100;

// Repairs point i: re-jitter its case position, then swap case rows with a
// random partner. Returns false when the retry budget is exhausted.
bool repair_point(LhsState& st, std::vector<ConfigPoint>& snapped, std::size_t i,
                  const std::vector<std::pair<double, double>>& J, const ConfigSpace& space,
                  const std::vector<ConfigPoint>& avoid, Rng& rng) {
  auto ok = [&](std::size_t idx) {
    return space.is_valid(snapped[idx]) && !collides(snapped[idx], snapped, idx) &&
           !collides(snapped[idx], avoid, avoid.size());
  };
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    if (attempt < kMaxRetries / 2) {
      // stage 1: new position within the same case
      for (std::size_t j = 0; j < st.n; ++j)
        st.unit[i][j] = (static_cast<double>(st.rows[j][i]) + rng.uniform()) / st.k;
    } else {
      // stage 2: swap one dimension's case row with a partner
      std::size_t j = static_cast<std::size_t>(rng.below(st.n));
      std::size_t partner = static_cast<std::size_t>(rng.below(st.k));
      if (partner == i) continue;
      std::swap(st.rows[j][i], st.rows[j][partner]);
      st.unit[i][j] = (static_cast<double>(st.rows[j][i]) + rng.uniform()) / st.k;
      st.unit[partner][j] = (static_cast<double>(st.rows[j][partner]) + rng.uniform()) / st.k;
      snapped[partner] = map_and_snap(st, partner, J, space);
      if (!ok(partner)) {
        // revert
        std::swap(st.rows[j][i], st.rows[j][partner]);
        st.unit[partner][j] = (static_cast<double>(st.rows[j][partner]) + rng.uniform()) / st.k;
        snapped[partner] = map_and_snap(st, partner, J, space);
        continue;
      }
    }
    snapped[i] = map_and_snap(st, i, J, space);
    if (ok(i)) return true;
  }
  return false;
}

std::vector<ConfigPoint> generate_sample(const LhsPlan& plan, const std::vector<ConfigPoint>& avoid,
                                         bool drop_unfixable) {
  if (plan.space == nullptr) throw std::invalid_argument("sample plan has no space");
  const ConfigSpace& space = *plan.space;
  const std::size_t k = plan.size;
  const std::size_t n = space.dimension_count();
  Rng rng(splitmix64(plan.seed ^ 0x5a5a5a5a5a5a5a5aULL));

  auto J = index_domain(space, k);
  LhsState st = lhs_state(k, n, plan.seed, rng);

  std::vector<ConfigPoint> snapped(k);
  for (std::size_t i = 0; i < k; ++i) snapped[i] = map_and_snap(st, i, J, space);

  std::vector<bool> keep(k, true);
  for (std::size_t i = 0; i < k; ++i) {
    bool good = space.is_valid(snapped[i]) && !collides(snapped[i], snapped, i) &&
                !collides(snapped[i], avoid, avoid.size());
    if (good) continue;
    if (!repair_point(st, snapped, i, J, space, avoid, rng)) {
      if (drop_unfixable)
        keep[i] = false;
      else
        throw std::runtime_error("sample generation: could not resolve collision within retry budget");
    }
  }

  std::vector<ConfigPoint> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    if (keep[i]) out.push_back(snapped[i]);
  return out;
}

}  // namespace

std::vector<ConfigPoint> generate_initial_sample(const LhsPlan& plan) {
  if (plan.mode != SampleMode::initial)
    throw std::invalid_argument("generate_initial_sample: plan mode must be initial");
  return generate_sample(plan, {}, /*drop_unfixable=*/false);
}

std::vector<ConfigPoint> generate_test_sample(const LhsPlan& plan,
                                              const std::vector<ConfigPoint>& existing) {
  if (plan.mode != SampleMode::test)
    throw std::invalid_argument("generate_test_sample: plan mode must be test");
  return generate_sample(plan, existing, /*drop_unfixable=*/true);
}

}  // namespace gpival
