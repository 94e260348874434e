#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "riskflow/error.hpp"
#include "riskflow/forward.hpp"
#include "riskflow/optimize.hpp"
#include "riskflow/validate.hpp"
#include "support.hpp"

using namespace riskflow;

namespace {

DiscreteDistribution point(double v) { return DiscreteDistribution::over_values({v}, {1.0}); }

DiscreteDistribution random_dist(support::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = support::uniform(rng, -2.0, 3.0);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return DiscreteDistribution::over_values(v, support::random_simplex(rng, v.size()));
}

// Circle chain with two drift actions and the follower cost.
struct SmallCircle {
  CircleGrid grid = build_circle_grid(5);
  ControlledGenerator base;
  CostTable cost;
};

SmallCircle small_circle(double cost_scale = 1.0) {
  SmallCircle s;
  const std::vector<double> actions{-0.3, 0.4};
  std::vector<RateMatrix> mats;
  s.cost.resize(5, 2);
  for (std::size_t a = 0; a < 2; ++a) {
    mats.push_back(discretize_circle_diffusion(s.grid, actions[a], 0.8));
    for (std::size_t i = 0; i < 5; ++i) {
      s.cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) =
          cost_scale * (1.0 - std::cos(s.grid.points[i]) + 2.0 * actions[a] * actions[a]);
    }
  }
  s.base = ControlledGenerator(mats);
  return s;
}

Eigen::VectorXd delta0(std::size_t n) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  v(0) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("wasserstein distance examples") {
  CHECK(wasserstein1(point(0.3), point(1.7)) == doctest::Approx(1.4));
  CHECK(wasserstein1(DiscreteDistribution::over_values({0.0, 1.0}, {0.5, 0.5}), point(0.5)) == doctest::Approx(0.5));
  support::Rng rng(71);
  const auto p = random_dist(rng, 6);
  CHECK(wasserstein1(p, p) == 0.0);
}

TEST_CASE("property: wasserstein distance is a metric") {
  support::Rng rng(72);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_dist(rng, 1 + support::index_below(rng, 7));
    const auto q = random_dist(rng, 1 + support::index_below(rng, 7));
    const auto r = random_dist(rng, 1 + support::index_below(rng, 7));
    REQUIRE(wasserstein1(p, p) <= 1e-12);
    REQUIRE(wasserstein1(p, q) >= 0.0);
    REQUIRE(std::abs(wasserstein1(p, q) - wasserstein1(q, p)) <= 1e-12);
    REQUIRE(wasserstein1(p, r) <= wasserstein1(p, q) + wasserstein1(q, r) + 1e-12);
  }
}

TEST_CASE("bounded Lipschitz distance examples") {
  CHECK(bounded_lipschitz_distance(point(0.4), point(0.4)) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(bounded_lipschitz_distance(point(0.0), point(2.0)) == doctest::Approx(1.0).epsilon(1e-8));
  support::Rng rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const double d = support::uniform(rng, 0.01, 10.0);
    // Best tent function: 2s = l d with s + l = 1.
    CHECK(bounded_lipschitz_distance(point(0.0), point(d)) == doctest::Approx(2.0 * d / (2.0 + d)).epsilon(1e-7));
  }
}

TEST_CASE("property: bounded Lipschitz distance is below min(2, W1)") {
  support::Rng rng(74);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_dist(rng, 1 + support::index_below(rng, 6));
    const auto q = random_dist(rng, 1 + support::index_below(rng, 6));
    const double bl = bounded_lipschitz_distance(p, q);
    REQUIRE(bl >= 0.0);
    REQUIRE(bl <= std::min(2.0, wasserstein1(p, q)) + 1e-8);
  }
}

TEST_CASE("empirical distributions merge repeated samples") {
  const auto e = empirical_distribution({1.0, 0.5, 1.0, 2.0});
  REQUIRE(e.size() == 3);
  CHECK(e.values() == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(e.mass()[1] == doctest::Approx(0.5));
  CHECK_THROWS(empirical_distribution({}));
}

TEST_CASE("simulation without cost accumulates nothing") {
  const auto s = small_circle(0.0);
  const auto t = build_uniform_grid(0.0, 3.0, 7);
  const auto y = build_uniform_grid(0.0, 2.0, 5);
  const auto policy = MarkovPolicy::constant(t.n, 5 * y.n, 2, 1);
  McConfig cfg;
  cfg.paths = 500;
  const auto mc = simulate_paths(s.base, policy, s.cost, 0.25, delta0(5), y, t, cfg);
  for (double v : mc.samples) CHECK(v == 0.0);
  CHECK(mc.mean == 0.0);
}

TEST_CASE("simulation of a single state integrates the discounted cost exactly") {
  ControlledGenerator base({make_rate_matrix(1, {})});
  const double c0 = 0.8, alpha = 0.3, horizon = 4.0;
  const auto t = build_uniform_grid(0.0, horizon, 9);
  const auto y = build_uniform_grid(0.0, 5.0, 11);
  McConfig cfg;
  cfg.paths = 50;
  const auto mc = simulate_paths(base, MarkovPolicy::constant(t.n, y.n, 1, 0), CostTable::Constant(1, 1, c0),
                                 alpha, delta0(1), y, t, cfg);
  const double exact = c0 * (1.0 - std::exp(-alpha * horizon)) / alpha;
  for (double v : mc.samples) CHECK(v == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("simulation is reproducible and seed dependent") {
  const auto s = small_circle();
  const auto t = build_uniform_grid(0.0, 2.0, 5);
  const auto y = build_uniform_grid(0.0, 3.0, 7);
  support::Rng rng(75);
  const auto policy = support::random_policy(rng, t.n, 5 * y.n, 2);
  McConfig cfg;
  cfg.paths = 300;
  cfg.seed = 9;
  const auto a = simulate_paths(s.base, policy, s.cost, 0.25, delta0(5), y, t, cfg);
  const auto b = simulate_paths(s.base, policy, s.cost, 0.25, delta0(5), y, t, cfg);
  CHECK(a.samples == b.samples);
  cfg.seed = 10;
  const auto c = simulate_paths(s.base, policy, s.cost, 0.25, delta0(5), y, t, cfg);
  CHECK(a.samples != c.samples);
  for (double v : a.samples) CHECK(v >= 0.0);
  double occ = 0.0;
  for (double v : a.x_occupancy) occ += v;
  CHECK(occ == doctest::Approx(1.0));
}

TEST_CASE("simulated mean agrees with the forward equation") {
  const auto s = small_circle();
  const double alpha = 0.25;
  const auto t = build_uniform_grid(0.0, 2.0, 81);
  const auto y = build_uniform_grid(0.0, 6.0, 121);
  AugmentedGenerator aug(s.base, s.cost, alpha, y);
  const auto product = aug.assemble(t, DiscountSampling::left);
  const auto policy = MarkovPolicy::constant(t.n, 5 * y.n, 2, 1);
  const auto prop = propagate_forward(product, policy, augmented_initial(delta0(5), y.n), t);
  double forward_mean = 0.0;
  for (std::size_t z = 0; z < 5 * y.n; ++z) forward_mean += y.points[z % y.n] * prop.slices.back()(static_cast<Eigen::Index>(z));

  McConfig cfg;
  cfg.paths = 10000;
  const auto mc = simulate_paths(s.base, policy, s.cost, alpha, delta0(5), y, t, cfg);
  const double allowance = 4.0 * mc.stddev / std::sqrt(10000.0) + y.spacing + t.spacing * s.cost.maxCoeff();
  CHECK(std::abs(mc.mean - forward_mean) <= allowance);
  CHECK(mc.stderr_mean == doctest::Approx(mc.stddev / 100.0));
}

TEST_CASE("comparison against a model marginal") {
  McResult mc;
  mc.samples = {0.5, 0.5, 3.0, 9.0};
  const auto model = DiscreteDistribution::over_values({0.5, 2.5}, {0.5, 0.5});
  const auto cmp = compare_to_marginal(mc, model, 2.5, 0.125);
  CHECK(cmp.w1_capped == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cmp.w1_raw == doctest::Approx(0.25 * 0.5 + 0.25 * 6.5));
  CHECK(cmp.grid_allowance == 0.125);
  CHECK(cmp.within());
}

TEST_CASE("dynamic programming base cases") {
  const auto s = small_circle(0.0);
  const auto t = build_uniform_grid(0.0, 3.0, 11);
  const auto dp = risk_neutral_dp(s.base, s.cost, 0.25, t, delta0(5), Eigen::VectorXd::Zero(5));
  CHECK(dp.value == 0.0);

  const double c0 = 0.7, alpha = 0.4;
  const auto fine = build_uniform_grid(0.0, 3.0, 301);
  const auto flat = small_circle(0.0);
  const auto dp2 = risk_neutral_dp(flat.base, CostTable::Constant(5, 2, c0), alpha, fine, delta0(5),
                                   Eigen::VectorXd::Zero(5));
  const double exact = c0 * (1.0 - std::exp(-alpha * 3.0)) / alpha;
  CHECK(std::abs(dp2.value - exact) <= fine.spacing * c0);
}

TEST_CASE("dynamic programming on the augmented chain equals the expectation LP") {
  support::Rng rng(76);
  for (int trial = 0; trial < 6; ++trial) {
    const auto t = support::random_tiny(rng, 3, 4, 2, 4);
    const auto lp = optimize_linear_risk(t.fp, t.product, t.layout, {RiskKind::expectation, 1.0, 0.0});
    Eigen::VectorXd terminal(static_cast<Eigen::Index>(t.fp.num_states()));
    for (std::size_t z = 0; z < t.fp.num_states(); ++z) terminal(static_cast<Eigen::Index>(z)) = t.y_grid.points[z % t.y_grid.n];
    const auto dp = risk_neutral_dp(t.product, CostTable::Zero(terminal.size(), 2), 0.0, t.t_grid, t.initial, terminal);
    CHECK(dp.value == doctest::Approx(lp.rho_star).epsilon(1e-8));
    const auto prop = propagate_forward(t.product, dp.policy, t.initial, t.t_grid);
    CHECK(prop.slices.back().dot(terminal) == doctest::Approx(dp.value).epsilon(1e-10));
  }
}

TEST_CASE("dynamic programming with running cost matches an untruncated cost grid") {
  const auto s = small_circle();
  const double alpha = 0.25;
  const auto t = build_uniform_grid(0.0, 1.0, 5);
  const auto dp = risk_neutral_dp(s.base, s.cost, alpha, t, delta0(5), Eigen::VectorXd::Zero(5));
  const auto y = build_uniform_grid(0.0, 24.0, 193);
  AugmentedGenerator aug(s.base, s.cost, alpha, y);
  const auto product = aug.assemble(t, DiscountSampling::left);
  Eigen::VectorXd terminal(static_cast<Eigen::Index>(5 * y.n));
  for (std::size_t z = 0; z < 5 * y.n; ++z) terminal(static_cast<Eigen::Index>(z)) = y.points[z % y.n];
  const auto aug_dp = risk_neutral_dp(product, CostTable::Zero(terminal.size(), 2), 0.0, t,
                                      augmented_initial(delta0(5), y.n), terminal);
  CHECK(aug_dp.value == doctest::Approx(dp.value).epsilon(1e-6));
}

TEST_CASE("enumeration base cases") {
  const auto s = small_circle();
  ControlledGenerator single({s.base.at(0, 0)});
  const auto y = build_uniform_grid(0.0, 2.0, 2);
  const auto t = build_uniform_grid(0.0, 1.0, 3);
  AugmentedGenerator aug(single, s.cost.col(0), 0.25, y);
  const auto product = aug.assemble(t, DiscountSampling::left);
  const auto init = augmented_initial(delta0(5), y.n);
  const RiskSpec spec{RiskKind::entropic, 1.0, 0.0};
  const auto en = enumerate_policies(product, init, t, s.grid.points, y.points, {}, spec);
  CHECK(en.policies_evaluated == 1);
  const auto prop = propagate_forward(product, MarkovPolicy::constant(t.n, 10, 1, 0), init, t);
  StateLayout layout{s.grid.points, y.points, {0.0}, t.points, {}};
  CHECK(en.best_value == doctest::Approx(evaluate(spec, total_cost_distribution(layout, prop.slices.back()))));

  support::Rng rng(77);
  auto tiny = support::random_tiny(rng, 2, 2, 2, 3);
  tiny = support::make_tiny(tiny.base, CostTable::Zero(2, 2), 0.1, 2, 1.0, 3, 1.0);
  const auto zero = enumerate_policies(tiny.product, tiny.initial, tiny.t_grid, tiny.layout.x_values,
                                       tiny.layout.y_values, {}, spec);
  CHECK(zero.best_value == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(zero.policies_evaluated == 256);
}

TEST_CASE("enumeration refuses large policy spaces") {
  support::Rng rng(78);
  const auto t = support::random_tiny(rng, 3, 3, 2, 4);
  CHECK_THROWS_AS(enumerate_policies(t.product, t.initial, t.t_grid, t.layout.x_values, t.layout.y_values, {},
                                     {RiskKind::expectation, 1.0, 0.0}),
                  PolicySpaceTooLarge);
}
