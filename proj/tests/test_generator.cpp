#include <doctest.h>

#include <cmath>
#include <numbers>

#include "riskflow/error.hpp"
#include "riskflow/forward.hpp"
#include "riskflow/generator.hpp"
#include "support.hpp"

using namespace riskflow;

namespace {

double row_sum(const RateMatrix& q, std::size_t i) {
  double s = 0.0;
  for (SparseRowMatrix::InnerIterator it(q.q, static_cast<Eigen::Index>(i)); it; ++it) s += it.value();
  return s;
}

}  // namespace

TEST_CASE("circle stencil without drift") {
  const auto g = build_circle_grid(4);
  const auto q = discretize_circle_diffusion(g, 0.0, 1.0);
  const double h = std::numbers::pi / 2;
  const double neighbor = 1.0 / (2.0 * h * h);
  CHECK(neighbor == doctest::Approx(0.202642).epsilon(1e-5));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(q.rate(i, (i + 1) % 4) == doctest::Approx(neighbor));
    CHECK(q.rate(i, (i + 3) % 4) == doctest::Approx(neighbor));
    CHECK(q.rate(i, (i + 2) % 4) == 0.0);
    CHECK(q.rate(i, i) == doctest::Approx(-0.405285).epsilon(1e-5));
  }
}

TEST_CASE("circle stencil with positive drift is upwinded to the right") {
  const auto q = discretize_circle_diffusion(build_circle_grid(4), 0.5, 1.0);
  const double h = std::numbers::pi / 2;
  CHECK(q.rate(0, 1) == doctest::Approx(1.0 / (2.0 * h * h) + 0.5 / h));
  CHECK(q.rate(0, 1) == doctest::Approx(0.520958).epsilon(1e-5));
  CHECK(q.rate(0, 3) == doctest::Approx(0.202642).epsilon(1e-5));
  CHECK(row_sum(q, 0) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("circle stencil rejects non-positive sigma") {
  CHECK_THROWS_AS(discretize_circle_diffusion(build_circle_grid(5), 0.0, 0.0), InvalidParameter);
}

TEST_CASE("validate_generator") {
  const auto good = discretize_circle_diffusion(build_circle_grid(7), 0.3, 0.8);
  CHECK(validate_generator(good).valid);

  const auto bad = rate_matrix_from_triplets(3, {{0, 0, 0.1}, {0, 1, -0.1}, {1, 1, 0.0}});
  const auto d = validate_generator(bad);
  CHECK_FALSE(d.valid);
  CHECK(d.min_off_diagonal == doctest::Approx(-0.1));

  const auto zero = rate_matrix_from_triplets(3, {});
  CHECK(validate_generator(zero).valid);

  const auto drift = rate_matrix_from_triplets(2, {{0, 0, -1.0}, {0, 1, 0.5}});
  CHECK_FALSE(validate_generator(drift).valid);
  CHECK(validate_generator(drift).max_row_sum_deviation == doctest::Approx(0.5));
}

TEST_CASE("zero cost gives a block-diagonal augmented generator") {
  const auto g = build_circle_grid(5);
  ControlledGenerator base({discretize_circle_diffusion(g, 0.2, 1.0), discretize_circle_diffusion(g, -0.4, 1.0)});
  const auto y = build_uniform_grid(0.0, 1.0, 4);
  AugmentedGenerator aug(base, CostTable::Zero(5, 2), 0.3, y);
  for (std::size_t a = 0; a < 2; ++a) {
    const auto q = aug.slice(a, 0.7);
    for (std::size_t x = 0; x < 5; ++x) {
      for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t x2 = 0; x2 < 5; ++x2) {
          for (std::size_t j2 = 0; j2 < 4; ++j2) {
            const double r = q.rate(aug.index(x, j), aug.index(x2, j2));
            if (j != j2) {
              REQUIRE(r == 0.0);
            } else {
              REQUIRE(r == doctest::Approx(base.at(0, a).rate(x, x2)));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("transport rate of the follower problem at t = 0") {
  const auto g = build_circle_grid(21);
  const auto acts = build_uniform_grid(-0.5, 0.5, 21);
  std::vector<RateMatrix> mats;
  CostTable cost(21, 21);
  for (std::size_t a = 0; a < 21; ++a) {
    mats.push_back(discretize_circle_diffusion(g, acts.points[a], 1.0));
    for (std::size_t i = 0; i < 21; ++i) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) =
          1.0 - std::cos(g.points[i]) + 2.0 * acts.points[a] * acts.points[a];
    }
  }
  AugmentedGenerator aug(ControlledGenerator(mats), cost, 0.25, build_uniform_grid(0.0, 2.5, 21));
  for (std::size_t a : {0u, 7u, 20u}) {
    const auto q = aug.slice(a, 0.0);
    for (std::size_t x : {0u, 5u, 13u}) {
      const double expected = (1.0 - std::cos(g.points[x]) + 2.0 * acts.points[a] * acts.points[a]) / 0.125;
      CHECK(q.rate(aug.index(x, 3), aug.index(x, 4)) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(q.rate(aug.index(x, 20), aug.index(x, 20)) == doctest::Approx(aug.base().at(0, a).rate(x, x)));
    }
  }
}

TEST_CASE("augmented generator rejects negative costs and discount") {
  ControlledGenerator base({discretize_circle_diffusion(build_circle_grid(3), 0.0, 1.0)});
  CostTable cost = CostTable::Constant(3, 1, 1.0);
  cost(1, 0) = -0.5;
  CHECK_THROWS_AS(AugmentedGenerator(base, cost, 0.1, build_uniform_grid(0, 1, 3)), InvalidCost);
  CHECK_THROWS_AS(AugmentedGenerator(base, CostTable::Zero(3, 1), -0.1, build_uniform_grid(0, 1, 3)),
                  InvalidParameter);
}

TEST_CASE("mean accumulated cost of a single state matches the discounted integral") {
  const double c0 = 1.0;
  const double alpha = 0.5;
  const double horizon = 2.0;
  auto base = ControlledGenerator({make_rate_matrix(1, {})});
  CostTable cost = CostTable::Constant(1, 1, c0);
  const auto y = build_uniform_grid(0.0, 3.0, 301);
  const auto t = build_uniform_grid(0.0, horizon, 401);
  AugmentedGenerator aug(base, cost, alpha, y);
  const auto product = aug.assemble(t, DiscountSampling::left);
  Eigen::VectorXd nu(1);
  nu << 1.0;
  const auto prop = propagate_forward(product, MarkovPolicy::constant(t.n, y.n, 1, 0), augmented_initial(nu, y.n), t);
  const Eigen::VectorXd& last = prop.slices.back();
  double mean = 0.0;
  for (std::size_t j = 0; j < y.n; ++j) mean += y.points[j] * last(static_cast<Eigen::Index>(j));
  const double exact = c0 * (1.0 - std::exp(-alpha * horizon)) / alpha;
  CHECK(std::abs(mean - exact) <= y.spacing + t.spacing * c0);
  CHECK(std::abs(mean - exact) <= 1e-2);
}

TEST_CASE("property: random augmented generators conserve mass") {
  support::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nx = 1 + support::index_below(rng, 8);
    const std::size_t na = 1 + support::index_below(rng, 3);
    const std::size_t ny = 2 + support::index_below(rng, 6);
    std::vector<RateMatrix> mats;
    for (std::size_t a = 0; a < na; ++a) mats.push_back(support::random_generator(rng, nx));
    CostTable cost(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(na));
    for (Eigen::Index i = 0; i < cost.size(); ++i) cost(i) = support::uniform(rng, 0.0, 3.0);
    const double alpha = support::uniform(rng, 0.0, 1.0);
    AugmentedGenerator aug(ControlledGenerator(mats), cost, alpha,
                           build_uniform_grid(0.0, support::uniform(rng, 0.5, 5.0), ny));
    const double t = support::uniform(rng, 0.0, 10.0);
    for (std::size_t a = 0; a < na; ++a) {
      const auto d = validate_generator(aug.slice(a, t));
      REQUIRE(d.valid);
      REQUIRE(d.max_row_sum_deviation <= 1e-10);
      REQUIRE(d.min_off_diagonal >= 0.0);
    }
  }
}

TEST_CASE("property: raising one cost entry changes only its transport rate") {
  support::Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t nx = 2 + support::index_below(rng, 4);
    const std::size_t na = 1 + support::index_below(rng, 3);
    std::vector<RateMatrix> mats;
    for (std::size_t a = 0; a < na; ++a) mats.push_back(support::random_generator(rng, nx));
    CostTable cost(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(na));
    for (Eigen::Index i = 0; i < cost.size(); ++i) cost(i) = support::uniform(rng, 0.0, 3.0);
    const auto y = build_uniform_grid(0.0, 2.0, 5);
    const std::size_t xi = support::index_below(rng, nx);
    const std::size_t ai = support::index_below(rng, na);
    CostTable raised = cost;
    raised(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)) += support::uniform(rng, 0.1, 2.0);
    AugmentedGenerator before(ControlledGenerator(mats), cost, 0.2, y);
    AugmentedGenerator after(ControlledGenerator(mats), raised, 0.2, y);
    for (std::size_t a = 0; a < na; ++a) {
      const Eigen::MatrixXd q0 = Eigen::MatrixXd(before.slice(a, 1.0).q);
      const Eigen::MatrixXd q1 = Eigen::MatrixXd(after.slice(a, 1.0).q);
      for (Eigen::Index r = 0; r < q0.rows(); ++r) {
        for (Eigen::Index c = 0; c < q0.cols(); ++c) {
          const std::size_t x = static_cast<std::size_t>(r) / y.n;
          const std::size_t j = static_cast<std::size_t>(r) % y.n;
          const bool transport = a == ai && x == xi && static_cast<std::size_t>(c) == before.index(x, j + 1) &&
                                 j + 1 < y.n;
          const bool diag = a == ai && x == xi && c == r && j + 1 < y.n;
          if (transport) {
            REQUIRE(q1(r, c) > q0(r, c));
          } else if (diag) {
            REQUIRE(q1(r, c) < q0(r, c));
          } else {
            REQUIRE(q1(r, c) == q0(r, c));
          }
        }
      }
    }
  }
}

TEST_CASE("property: without discount the augmented generator is time independent") {
  support::Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nx = 2 + support::index_below(rng, 4);
    std::vector<RateMatrix> mats{support::random_generator(rng, nx)};
    CostTable cost(static_cast<Eigen::Index>(nx), 1);
    for (Eigen::Index i = 0; i < cost.size(); ++i) cost(i) = support::uniform(rng, 0.0, 3.0);
    AugmentedGenerator aug(ControlledGenerator(mats), cost, 0.0, build_uniform_grid(0.0, 2.0, 4));
    const auto product = aug.assemble(build_uniform_grid(0.0, 5.0, 6), DiscountSampling::left);
    const Eigen::MatrixXd first = Eigen::MatrixXd(product.at(0, 0).q);
    for (std::size_t k = 1; k < product.num_steps(); ++k) {
      REQUIRE((Eigen::MatrixXd(product.at(k, 0).q) - first).norm() == 0.0);
    }
  }
}

TEST_CASE("discount sampling picks the step endpoint") {
  ControlledGenerator base({make_rate_matrix(1, {})});
  AugmentedGenerator aug(base, CostTable::Constant(1, 1, 1.0), 0.5, build_uniform_grid(0.0, 1.0, 3));
  const auto t = build_uniform_grid(0.0, 2.0, 3);
  const auto left = aug.assemble(t, DiscountSampling::left);
  const auto right = aug.assemble(t, DiscountSampling::right);
  CHECK(left.at(1, 0).rate(0, 1) == doctest::Approx(std::exp(-0.5) / 0.5));
  CHECK(right.at(1, 0).rate(0, 1) == doctest::Approx(std::exp(-1.0) / 0.5));
}

TEST_CASE("controlled generator shape checks") {
  CHECK_THROWS(ControlledGenerator({make_rate_matrix(2, {}), make_rate_matrix(3, {})}));
  ControlledGenerator g({make_rate_matrix(2, {}), make_rate_matrix(2, {})});
  CHECK(g.dim() == 2);
  CHECK(g.num_actions() == 2);
  CHECK_FALSE(g.time_dependent());
}
