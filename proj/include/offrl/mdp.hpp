#pragma once

#include "offrl/random.hpp"
#include "offrl/types.hpp"

#include <functional>
#include <vector>

namespace offrl {

/// Generative interface shared by the tabular and the linear benchmark
/// models. Implementations are immutable; all randomness comes from the
/// caller's `Rng`.
class MdpModel {
 public:
  virtual ~MdpModel() = default;

  virtual int num_actions() const = 0;
  virtual Eigen::Index state_dim() const = 0;
  virtual double discount() const = 0;
  /// Declared bound M with |r| ≤ M almost surely.
  virtual double reward_bound() const = 0;

  virtual StateVec sample_initial(Rng& rng) const = 0;

  /// Draws (r, s') for the pair (s, a); `next` must already have size
  /// `state_dim()`. Returns the reward.
  virtual double step(const StateVec& s, ActionId a, Rng& rng, StateVec& next) const = 0;
};

/// Deterministic stationary policy.
using Policy = std::function<ActionId(const StateVec&)>;

struct TrajectoryStep {
  StateVec state;
  ActionId action = 0;
  double reward = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  int horizon = 0;
};

/// Rolls `policy` for exactly `horizon` steps from s₀ ~ μ.
Trajectory sample_trajectory(const MdpModel& mdp, const Policy& policy, int horizon, Rng& rng);

/// Σ_{t<horizon} γᵗ r_t along a fresh rollout, without storing the path.
double discounted_rollout(const MdpModel& mdp, const Policy& policy, int horizon, Rng& rng);

}  // namespace offrl
