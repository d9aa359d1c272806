#include "offrl/mdp.hpp"

namespace offrl {

Trajectory sample_trajectory(const MdpModel& mdp, const Policy& policy, int horizon, Rng& rng) {
  require(horizon >= 0, "horizon must be nonnegative");
  Trajectory traj;
  traj.horizon = horizon;
  if (horizon == 0) return traj;
  traj.steps.reserve(static_cast<std::size_t>(horizon));
  StateVec s = mdp.sample_initial(rng);
  StateVec next(mdp.state_dim());
  for (int t = 0; t < horizon; ++t) {
    const ActionId a = policy(s);
    const double r = mdp.step(s, a, rng, next);
    traj.steps.push_back({s, a, r});
    s.swap(next);
  }
  return traj;
}

double discounted_rollout(const MdpModel& mdp, const Policy& policy, int horizon, Rng& rng) {
  StateVec s = mdp.sample_initial(rng);
  StateVec next(mdp.state_dim());
  const double gamma = mdp.discount();
  double ret = 0.0;
  double disc = 1.0;
  for (int t = 0; t < horizon; ++t) {
    ret += disc * mdp.step(s, policy(s), rng, next);
    disc *= gamma;
    s.swap(next);
  }
  return ret;
}

}  // namespace offrl
