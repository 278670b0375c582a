#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gpival/config_space.hpp"

namespace gpival {

enum class SampleMode { initial, test };

struct LhsPlan {
  std::size_t size = 400;
  std::uint64_t seed = 0;
  const ConfigSpace* space = nullptr;
  SampleMode mode = SampleMode::initial;
};

// Latin hypercube sample in [0,1]^n: one point per row along every axis,
// placed uniformly inside its case. Among `budget` candidate Latin grids the
// one with the largest minimal inter-case distance is kept. Deterministic
// for a given seed.
std::vector<ConfigPoint> lhs_unit(std::size_t k, std::size_t n, std::uint64_t seed,
                                  std::size_t budget = 50);

// Continuous index domain J_X: continuous dims keep their interval, discrete
// dims are widened by one case, the power dim is the index range [0, 21].
std::vector<std::pair<double, double>> index_domain(const ConfigSpace& space, std::size_t k);

// LHS -> affine map onto J_X -> floor-snap. All points valid and distinct;
// collisions and unresolvable sources are repaired by re-jittering the case
// position and, failing that, swapping case rows with a partner point.
std::vector<ConfigPoint> generate_initial_sample(const LhsPlan& plan);

// Like the initial sample but disjoint from `existing`; points that cannot
// be separated within the retry budget are dropped.
std::vector<ConfigPoint> generate_test_sample(const LhsPlan& plan,
                                              const std::vector<ConfigPoint>& existing);

}  // namespace gpival
