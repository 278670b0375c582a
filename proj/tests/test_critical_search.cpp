#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "gpival/critical_search.hpp"
#include "gpival/model_build.hpp"
#include "gpival/normal.hpp"
#include "gpival/oracle_fields.hpp"
#include "gpival/sampling.hpp"

using namespace gpival;

TEST_CASE("delta measure") {
  VariogramModel g{VariogramShape::gaussian, 10.0, 100.0, 100.0};
  DeltaMeasure delta(g, 0.1);

  SUBCASE("reference value at l = 10") {
    CHECK(delta(10.0) == doctest::Approx(23.9116).epsilon(1e-4));
  }
  SUBCASE("clamp branches") {
    // below the nugget threshold: zero
    double quant = std::fabs(normal_quantile(0.1));
    double l_nugget = std::sqrt(2.0 * g.nugget) * quant;
    CHECK(delta(0.999 * l_nugget) == 0.0);
    // beyond the plateau: the range
    double l_sill = std::sqrt(2.0 * (g.nugget + g.sill)) * quant;
    CHECK(delta(1.001 * l_sill) == g.range);
    CHECK(delta(10.0 * l_sill) == g.range);
  }
  SUBCASE("bounded, monotone in l, and monotone in p") {
    double prev = -1.0;
    for (double l = 0.0; l <= 60.0; l += 0.25) {
      double d = delta(l);
      CHECK(d >= 0.0);
      CHECK(d <= g.range);
      CHECK(d >= prev - 1e-12);
      prev = d;
    }
    // a finer sensitivity never searches farther
    for (double l : {5.0, 10.0, 20.0, 40.0}) {
      double coarse = DeltaMeasure(g, 0.3)(l);
      double fine = DeltaMeasure(g, 0.05)(l);
      CHECK(fine <= coarse + 1e-12);
    }
  }
  SUBCASE("matches bisection of the model over both branches") {
    for (auto shape : {VariogramShape::exponential, VariogramShape::gaussian,
                       VariogramShape::spherical}) {
      VariogramModel m{shape, 0.05, 1.2, 0.8};
      DeltaMeasure d(m, 0.2);
      double quant = std::fabs(normal_quantile(0.2));
      for (double l = 0.01; l < 3.0; l += 0.037) {
        // independent oracle: bisection of eval_model on [0, range]
        double target = 0.5 * (l / quant) * (l / quant);
        double lo = 0.0, hi = m.range;
        if (target <= m.nugget) {
          CHECK(d(l) == 0.0);
          continue;
        }
        if (target >= eval_model(m, m.range)) {
          CHECK(d(l) == m.range);
          continue;
        }
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (lo + hi);
          (eval_model(m, mid) < target ? lo : hi) = mid;
        }
        CHECK(d(l) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
      }
    }
  }
  SUBCASE("sensitivity outside (0, 0.5) is rejected") {
    CHECK_THROWS(DeltaMeasure(g, 0.0));
    CHECK_THROWS(DeltaMeasure(g, 0.5));
    CHECK_THROWS(DeltaMeasure(g, 0.7));
  }
}

TEST_CASE("required sample size") {
  // 2-D unit square with delta(lbar) about 0.3 -> ceil(1/0.3)^2 = 16
  auto space = std::make_shared<const ConfigSpace>(
      make_box_space("square", {{"a", 0, 1}, {"b", 0, 1}}));
  auto pts = lhs_unit(30, 2, 41);
  std::vector<double> vals(30, 0.0);  // every value sits mid-band

  SUBCASE("matches the product formula") {
    // gaussian with parameters arranged so delta(lbar) = 0.3 exactly:
    // lbar = 1 for thresholds at +-1; pick sensitivity then solve
    VariogramModel g{VariogramShape::gaussian, 0.0, 1.0, 0.4};
    GpiModel model(ValuedSample{pts, vals, {}}, AnisotropyMap::identity(2), g, 0.0, space);
    SearchParams params;
    params.t_lower = -1.0;
    params.t_upper = 1.0;
    params.sensitivity = 0.1;
    DeltaMeasure delta(g, params.sensitivity);
    double d = delta(1.0);
    std::size_t expect = static_cast<std::size_t>(std::ceil(1.0 / d)) *
                         static_cast<std::size_t>(std::ceil(1.0 / d));
    expect = std::clamp<std::size_t>(expect, params.cap_min, params.cap_max);
    CHECK(required_sample_size(model, params) == expect);
  }

  SUBCASE("caps apply") {
    VariogramModel wide{VariogramShape::gaussian, 0.0, 1.0, 2.0};
    GpiModel model(ValuedSample{pts, vals, {}}, AnisotropyMap::identity(2), wide, 0.0, space);
    SearchParams params;
    params.t_lower = -1.0;
    params.t_upper = 1.0;
    params.sensitivity = 0.45;  // very coarse: tiny nu clamps up to cap_min
    CHECK(required_sample_size(model, params) == params.cap_min);

    VariogramModel narrow{VariogramShape::gaussian, 0.0, 1.0, 0.005};
    GpiModel m2(ValuedSample{pts, vals, {}}, AnisotropyMap::identity(2), narrow, 0.0, space);
    params.sensitivity = 0.05;
    CHECK(required_sample_size(m2, params) == params.cap_max);
  }

  SUBCASE("smaller sensitivity never shrinks the population") {
    VariogramModel g{VariogramShape::gaussian, 0.0, 1.0, 0.4};
    GpiModel model(ValuedSample{pts, vals, {}}, AnisotropyMap::identity(2), g, 0.0, space);
    SearchParams params;
    params.t_lower = -1.0;
    params.t_upper = 1.0;
    params.cap_max = 100000;
    std::size_t prev = 0;
    for (double p : {0.45, 0.3, 0.2, 0.1, 0.05, 0.02}) {
      params.sensitivity = p;
      std::size_t nu = required_sample_size(model, params);
      CHECK(nu >= prev);
      prev = nu;
    }
  }
}

TEST_CASE("search algorithm") {
  SUBCASE("1-D ramp walks into the upper threshold region") {
    // f(x) = x on [0, 1], T+ = 0.8, single start at 0.5: after 8 iterations
    // the point must sit in [0.8, 1]. Variogram matched to the ramp
    // (sill = Var(f) = 1/12, range = domain length).
    VariogramModel g{VariogramShape::gaussian, 0.0, 1.0 / 12.0, 1.0};
    DeltaMeasure delta(g, 0.1);
    SearchParams params;
    params.t_lower = -0.8;
    params.t_upper = 0.8;
    params.sensitivity = 0.1;
    params.repulsion = 0.0;
    params.iterations = 8;
    auto f = [](const ConfigPoint& x) { return x[0]; };
    auto res = search({{0.5}}, f, params, delta, {0.0}, {1.0});
    CHECK(res.points[0][0] >= 0.8);
    CHECK(res.points[0][0] <= 1.0);
    CHECK(res.values[0] == doctest::Approx(res.points[0][0]));
  }

  SUBCASE("population size is preserved and stays inside the box") {
    OracleField field = sine_wave_field(3);
    auto pop = lhs_unit(25, 2, 77);
    VariogramModel g{VariogramShape::gaussian, 1e-6, 0.23, 0.97};
    DeltaMeasure delta(g, 0.1);
    SearchParams params;
    params.t_lower = -0.75;
    params.t_upper = 0.75;
    auto f = [&](const ConfigPoint& x) { return field.deterministic(x); };
    auto res = search(pop, f, params, delta, {0.0, 0.0}, {1.0, 1.0});
    CHECK(res.points.size() == 25);
    for (const auto& p : res.points) {
      CHECK(p[0] >= 0.0);
      CHECK(p[0] <= 1.0);
      CHECK(p[1] >= 0.0);
      CHECK(p[1] <= 1.0);
    }
  }

  SUBCASE("search is deterministic") {
    auto pop = lhs_unit(10, 2, 5);
    VariogramModel g{VariogramShape::gaussian, 0.0, 0.2, 0.5};
    DeltaMeasure delta(g, 0.15);
    SearchParams params;
    params.t_lower = -0.7;
    params.t_upper = 0.7;
    auto f = [](const ConfigPoint& x) { return sine_wave(x[0], x[1]); };
    auto a = search(pop, f, params, delta, {0, 0}, {1, 1});
    auto b = search(pop, f, params, delta, {0, 0}, {1, 1});
    CHECK(a.points == b.points);
  }

  SUBCASE("after two iterations points surround the critical region") {
    OracleField field = sine_wave_field(12);
    GridOracle oracle = grid_oracle(field, 400, -0.70, 0.75);
    REQUIRE(!oracle.sublevel.empty());

    auto pop = lhs_unit(50, 2, 12);
    VariogramModel g{VariogramShape::gaussian, 1e-6, 0.23, 0.97};
    DeltaMeasure delta(g, 0.1);
    SearchParams params;
    params.t_lower = -0.75;
    params.t_upper = 0.75;
    params.iterations = 2;
    auto f = [&](const ConfigPoint& x) { return field.deterministic(x); };
    auto res = search(pop, f, params, delta, {0, 0}, {1, 1});

    // points that crossed the lower threshold sit near the oracle region
    double margin = delta(0.05);
    int crossed = 0, near = 0;
    for (std::size_t i = 0; i < res.points.size(); ++i) {
      if (res.values[i] > -0.70) continue;
      ++crossed;
      double dmin = 1e300;
      for (const auto& q : oracle.sublevel) {
        double dx = q[0] - res.points[i][0], dy = q[1] - res.points[i][1];
        dmin = std::min(dmin, std::sqrt(dx * dx + dy * dy));
      }
      if (dmin <= margin) ++near;
    }
    CHECK(crossed > 0);
    CHECK(near >= (8 * crossed) / 10);
  }
}

TEST_CASE("filter algorithm") {
  SUBCASE("reference probability") {
    auto f = [](const ConfigPoint&) { return std::make_pair(0.9, 0.2); };
    auto res = filter({{0.0}}, f, -1.0, 1.0, 0.95);
    REQUIRE(res.middle.size() == 1);
    CHECK(res.probabilities[0] == doctest::Approx(0.3085).epsilon(1e-3));
  }
  SUBCASE("zero-sigma limit semantics") {
    auto inside = [](const ConfigPoint&) { return std::make_pair(0.4, 0.0); };
    auto res = filter({{0.0}}, inside, -1.0, 1.0, 0.95);
    REQUIRE(res.middle.size() == 1);
    CHECK(res.probabilities[0] == 0.0);

    auto below = [](const ConfigPoint&) { return std::make_pair(-2.0, 0.0); };
    auto res2 = filter({{0.0}}, below, -1.0, 1.0, 0.95);
    CHECK(res2.lower.size() == 1);
  }
  SUBCASE("boundary classification is inclusive") {
    double p = 0.9;
    double a = normal_quantile(p);
    double t_upper = 1.0, sigma = 0.3;
    double mu = t_upper + sigma * a;  // exactly at the gate
    auto f = [&](const ConfigPoint&) { return std::make_pair(mu, sigma); };
    auto res = filter({{0.0}}, f, -1.0, t_upper, p);
    CHECK(res.upper.size() == 1);
  }
  SUBCASE("partition covers the population exactly") {
    Rng rng(9);
    std::vector<ConfigPoint> pop;
    for (int i = 0; i < 200; ++i) pop.push_back({rng.uniform()});
    auto f = [&](const ConfigPoint& x) {
      return std::make_pair(4.0 * (x[0] - 0.5), 0.3 + 0.2 * x[0]);
    };
    auto res = filter(pop, f, -1.0, 1.0, 0.9);
    CHECK(res.lower.size() + res.upper.size() + res.middle.size() == pop.size());
    CHECK(res.probabilities.size() == res.middle.size());
    std::set<std::size_t> seen;
    for (auto i : res.lower) seen.insert(i);
    for (auto i : res.upper) seen.insert(i);
    for (auto i : res.middle) seen.insert(i);
    CHECK(seen.size() == pop.size());
    for (double p : res.probabilities) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
}

TEST_CASE("run_critical_search on the analytic benchmark") {
  OracleField field = sine_wave_field(1);
  auto pts = lhs_unit(50, 2, 1);
  std::vector<double> vals;
  for (const auto& p : pts) vals.push_back(field(p));

  BuiltModel built = build_gpi_model(ValuedSample{pts, vals, {}}, field.space(),
                                     benchmark_fit_options(field.noise_std()));

  SearchParams params;
  params.t_lower = -0.75;
  params.t_upper = 0.75;
  params.sensitivity = 0.1;
  params.repulsion = 0.1;

  SUBCASE("deterministic and bounded by the population size") {
    auto a = run_critical_search(built.model, params, 99);
    auto b = run_critical_search(built.model, params, 99);
    CHECK(a.to_json() == b.to_json());
    std::size_t nu = required_sample_size(built.model, params);
    CHECK(a.rows.size() <= nu);
    for (std::size_t i = 1; i < a.rows.size(); ++i)
      CHECK(a.rows[i - 1].probability >= a.rows[i].probability);
    for (const auto& r : a.rows) CHECK(r.probability >= params.report_floor);
  }

  SUBCASE("a surface far inside the thresholds reports nothing") {
    SearchParams wide = params;
    wide.t_lower = -50.0;
    wide.t_upper = 50.0;
    auto rep = run_critical_search(built.model, wide, 7);
    CHECK(rep.rows.empty());
  }
}

TEST_CASE("critical report json round-trip") {
  CriticalReport rep;
  rep.rows.push_back({{1.0, 2.0}, "V750", -1.2, 0.3, 0.188});
  rep.rows.push_back({{0.5, 0.1}, "", 0.9, 0.1, 0.05});
  CriticalReport back = CriticalReport::from_json(rep.to_json());
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0].source == "V750");
  CHECK(back.rows[0].probability == doctest::Approx(0.188));
  CHECK(back.rows[1].point == ConfigPoint{0.5, 0.1});
}
