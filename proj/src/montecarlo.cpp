#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "riskflow/error.hpp"
#include "riskflow/validate.hpp"

namespace riskflow {

namespace {

// Per-path generator: the path index selects an independent substream.
std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t path) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  return std::mt19937_64(seq);
}

std::size_t sample_index(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  // Round-off: fall back to the last index with positive weight.
  for (std::size_t i = probs.size(); i-- > 0;) {
    if (probs[i] > 0.0) return i;
  }
  return probs.size() - 1;
}

double discounted_integral(double alpha, double from, double to) {
  if (alpha == 0.0) return to - from;
  return (std::exp(-alpha * from) - std::exp(-alpha * to)) / alpha;
}

}  // namespace

McResult simulate_paths(const ControlledGenerator& base, const MarkovPolicy& policy, const CostTable& cost_rate,
                        double discount, const Eigen::VectorXd& nu, const UniformGrid& y_grid,
                        const UniformGrid& t_grid, const McConfig& cfg) {
  const std::size_t nx = base.dim();
  const std::size_t ny = y_grid.n;
  if (cfg.paths < 1) throw InvalidParameter("Monte Carlo needs at least one path");
  if (!(discount >= 0.0)) throw InvalidParameter("discount rate must be non-negative");
  if (policy.num_states() != nx * ny || policy.num_times() != t_grid.n ||
      policy.num_actions() != base.num_actions()) {
    throw InvalidParameter("policy shape does not match the simulated chain");
  }
  if (static_cast<std::size_t>(nu.size()) != nx) throw InvalidParameter("initial law has the wrong size");
  const double horizon = cfg.horizon > 0.0 ? std::min(cfg.horizon, t_grid.hi) : t_grid.hi;
  const std::vector<double> nu_probs(nu.data(), nu.data() + nu.size());

  McResult out;
  out.samples.resize(cfg.paths);
  out.x_occupancy.assign(nx, 0.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (std::size_t p = 0; p < cfg.paths; ++p) {
    auto rng = path_engine(cfg.seed, p);
    std::size_t x = sample_index(nu_probs, unif(rng));
    double y = 0.0;
    double t = t_grid.lo;

    for (std::size_t k = 0; k + 1 < t_grid.n && t < horizon; ++k) {
      const double t_end = std::min(t_grid.points[k + 1], horizon);
      auto pick_action = [&]() {
        const std::size_t z = x * ny + y_grid.nearest(y);
        if (!policy.reachable(k + 1, z)) ++out.fallback_events;
        return sample_index(policy.cell(k + 1, z), unif(rng));
      };
      std::size_t a = pick_action();
      while (true) {
        const auto& q = base.at(k, a).q;
        const double total_rate = -q.coeff(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x));
        const double wait = total_rate > 0.0 ? std::exponential_distribution<double>(total_rate)(rng)
                                             : std::numeric_limits<double>::infinity();
        const double c = cost_rate(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(a));
        if (t + wait >= t_end) {
          y += c * discounted_integral(discount, t, t_end);
          t = t_end;
          break;
        }
        y += c * discounted_integral(discount, t, t + wait);
        t += wait;
        // Jump target proportional to the off-diagonal rates of row x.
        double target = unif(rng) * total_rate;
        std::size_t next = x;
        for (SparseRowMatrix::InnerIterator it(q, static_cast<Eigen::Index>(x)); it; ++it) {
          if (it.col() == static_cast<Eigen::Index>(x) || it.value() <= 0.0) continue;
          next = static_cast<std::size_t>(it.col());
          target -= it.value();
          if (target < 0.0) break;
        }
        x = next;
        a = pick_action();
      }
    }
    out.samples[p] = y;
    out.x_occupancy[x] += 1.0;
  }

  const double n = static_cast<double>(cfg.paths);
  for (double& o : out.x_occupancy) o /= n;
  double sum = 0.0;
  for (double s : out.samples) sum += s;
  out.mean = sum / n;
  double sq = 0.0;
  for (double s : out.samples) sq += (s - out.mean) * (s - out.mean);
  out.stddev = cfg.paths > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  out.stderr_mean = out.stddev / std::sqrt(n);
  return out;
}

}  // namespace riskflow

namespace riskflow {

McComparison compare_to_marginal(const McResult& mc, const DiscreteDistribution& model, double y_cap,
                                 double grid_spacing) {
  McComparison out;
  std::vector<double> capped(mc.samples.size());
  std::transform(mc.samples.begin(), mc.samples.end(), capped.begin(),
                 [&](double y) { return std::min(y, y_cap); });
  const double n = static_cast<double>(capped.size());
  double mean = 0.0;
  for (double y : capped) mean += y;
  mean /= n;
  double var = 0.0;
  for (double y : capped) var += (y - mean) * (y - mean);
  var = capped.size() > 1 ? var / (n - 1.0) : 0.0;
  out.capped_mean = mean;
  out.grid_allowance = grid_spacing;
  out.stderr_allowance = 3.0 * std::sqrt(var / n);
  out.w1_raw = wasserstein1(empirical_distribution(mc.samples), model);
  out.w1_capped = wasserstein1(empirical_distribution(std::move(capped)), model);
  return out;
}

}  // namespace riskflow
