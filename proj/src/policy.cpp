#include "riskflow/policy.hpp"

#include <algorithm>

#include "riskflow/error.hpp"

namespace riskflow {

MarkovPolicy::MarkovPolicy(std::size_t num_times, std::size_t num_states, std::size_t num_actions)
    : num_times_(num_times),
      num_states_(num_states),
      num_actions_(num_actions),
      probs_(num_times * num_states * num_actions, 1.0 / static_cast<double>(num_actions)),
      reachable_(num_times * num_states, false) {
  if (num_actions == 0) throw InvalidParameter("policy needs at least one action");
}

MarkovPolicy MarkovPolicy::constant(std::size_t num_times, std::size_t num_states,
                                    std::size_t num_actions, std::size_t action) {
  MarkovPolicy p(num_times, num_states, num_actions);
  for (std::size_t k = 0; k < num_times; ++k) {
    for (std::size_t z = 0; z < num_states; ++z) p.set_action(k, z, action);
  }
  return p;
}

std::span<const double> MarkovPolicy::cell(std::size_t k, std::size_t z) const {
  return {probs_.data() + offset(k, z), num_actions_};
}

double MarkovPolicy::prob(std::size_t k, std::size_t z, std::size_t a) const {
  return probs_[offset(k, z) + a];
}

bool MarkovPolicy::reachable(std::size_t k, std::size_t z) const {
  return reachable_[k * num_states_ + z];
}

void MarkovPolicy::set_cell(std::size_t k, std::size_t z, std::span<const double> probs, bool reachable) {
  if (probs.size() != num_actions_) throw InvalidParameter("policy cell has wrong action count");
  std::copy(probs.begin(), probs.end(), probs_.begin() + static_cast<std::ptrdiff_t>(offset(k, z)));
  reachable_[k * num_states_ + z] = reachable;
}

void MarkovPolicy::set_action(std::size_t k, std::size_t z, std::size_t action) {
  if (action >= num_actions_) throw InvalidParameter("action index out of range");
  auto first = probs_.begin() + static_cast<std::ptrdiff_t>(offset(k, z));
  std::fill(first, first + static_cast<std::ptrdiff_t>(num_actions_), 0.0);
  first[static_cast<std::ptrdiff_t>(action)] = 1.0;
  reachable_[k * num_states_ + z] = true;
}

std::size_t MarkovPolicy::reachable_count() const {
  return static_cast<std::size_t>(std::count(reachable_.begin(), reachable_.end(), true));
}

double MarkovPolicy::strictness_fraction(double threshold) const {
  std::size_t total = 0;
  std::size_t strict = 0;
  for (std::size_t k = 1; k < num_times_; ++k) {
    for (std::size_t z = 0; z < num_states_; ++z) {
      if (!reachable(k, z)) continue;
      ++total;
      const auto c = cell(k, z);
      if (*std::max_element(c.begin(), c.end()) >= threshold) ++strict;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(strict) / static_cast<double>(total);
}

MarkovPolicy extract_policy(std::span<const double> joint, std::size_t num_times, std::size_t num_states,
                            std::size_t num_actions, double mass_floor) {
  if (joint.size() != num_times * num_states * num_actions) {
    throw InvalidParameter("joint measure size does not match (times x states x actions)");
  }
  MarkovPolicy policy(num_times, num_states, num_actions);
  std::vector<double> cond(num_actions);
  for (std::size_t k = 0; k < num_times; ++k) {
    for (std::size_t z = 0; z < num_states; ++z) {
      const double* m = joint.data() + (k * num_states + z) * num_actions;
      double sum = 0.0;
      for (std::size_t a = 0; a < num_actions; ++a) sum += std::max(m[a], 0.0);
      if (sum <= mass_floor) continue;
      for (std::size_t a = 0; a < num_actions; ++a) cond[a] = std::max(m[a], 0.0) / sum;
      policy.set_cell(k, z, cond, true);
    }
  }
  return policy;
}

MarkovPolicy extract_policy(const TrajectoryDistribution& traj, double mass_floor) {
  if (traj.slices.empty()) throw InvalidParameter("empty trajectory");
  const auto& axes = traj.slices.front().axes();
  const std::size_t num_actions = axes.back().values.size();
  const std::size_t num_states = traj.slices.front().size() / num_actions;
  std::vector<double> joint;
  joint.reserve(traj.slices.size() * num_states * num_actions);
  for (const auto& s : traj.slices) {
    if (s.size() != num_states * num_actions) throw InvalidParameter("trajectory slices differ in shape");
    joint.insert(joint.end(), s.mass().begin(), s.mass().end());
  }
  return extract_policy(joint, traj.slices.size(), num_states, num_actions, mass_floor);
}

}  // namespace riskflow
