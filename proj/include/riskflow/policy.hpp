#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "riskflow/distribution.hpp"

namespace riskflow {

// Markov control: for every time index k and product state z a
// distribution over action indices. Slice k governs the step that ends at
// t_k. Cells without mass carry the uniform law and are masked unreachable.
class MarkovPolicy {
 public:
  MarkovPolicy() = default;
  MarkovPolicy(std::size_t num_times, std::size_t num_states, std::size_t num_actions);

  // Same deterministic action everywhere; all cells marked reachable.
  static MarkovPolicy constant(std::size_t num_times, std::size_t num_states,
                               std::size_t num_actions, std::size_t action);

  std::size_t num_times() const { return num_times_; }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }

  std::span<const double> cell(std::size_t k, std::size_t z) const;
  double prob(std::size_t k, std::size_t z, std::size_t a) const;
  bool reachable(std::size_t k, std::size_t z) const;

  void set_cell(std::size_t k, std::size_t z, std::span<const double> probs, bool reachable = true);
  void set_action(std::size_t k, std::size_t z, std::size_t action);

  // Fraction of reachable cells whose largest action probability is at
  // least `threshold`. Slice 0 drives no step and is not counted.
  double strictness_fraction(double threshold = 0.99) const;
  std::size_t reachable_count() const;

 private:
  std::size_t offset(std::size_t k, std::size_t z) const { return (k * num_states_ + z) * num_actions_; }

  std::size_t num_times_ = 0;
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<double> probs_;
  std::vector<bool> reachable_;
};

inline constexpr double kMassFloor = 1e-12;

// Conditional action law from joint masses laid out as [k][z][a].
MarkovPolicy extract_policy(std::span<const double> joint, std::size_t num_times, std::size_t num_states,
                            std::size_t num_actions, double mass_floor = kMassFloor);

// Same, from per-time joint distributions whose last axis is the action.
MarkovPolicy extract_policy(const TrajectoryDistribution& traj, double mass_floor = kMassFloor);

}  // namespace riskflow
