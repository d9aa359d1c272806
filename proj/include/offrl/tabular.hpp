#pragma once

#include "offrl/mdp.hpp"

#include "json.hpp"

#include <string>

namespace offrl {

/// Q-function of a finite MDP: rows are states, columns actions.
using TabularQFunction = MatX;

/// Deterministic tabular policy: entry s is the action taken in state s.
using TabularPolicy = Eigen::VectorXi;

/// Finite MDP with deterministic mean rewards r(s,a).
///
/// Transitions are stored as a (|S|·|A|) × |S| matrix whose row s·|A|+a is
/// P(·|s,a). An optional reward noise adds Uniform(−h, h) to sampled
/// rewards (mean unchanged); it is off by default and never affects the
/// exact solvers.
class TabularMdp final : public MdpModel {
 public:
  TabularMdp(MatX rewards, MatX transitions, VecX initial_dist, double gamma,
             double reward_noise = 0.0);

  int num_states() const { return static_cast<int>(rewards_.rows()); }
  int num_actions() const override { return static_cast<int>(rewards_.cols()); }
  Eigen::Index state_dim() const override { return 1; }
  double discount() const override { return gamma_; }
  double reward_bound() const override { return reward_bound_; }
  double reward_noise() const { return reward_noise_; }

  const MatX& rewards() const { return rewards_; }
  const MatX& transitions() const { return transitions_; }
  const VecX& initial_dist() const { return initial_dist_; }

  /// P(·|s,a) as a row expression.
  auto transition_row(int s, ActionId a) const {
    return transitions_.row(static_cast<Eigen::Index>(s) * num_actions() + a);
  }

  StateVec sample_initial(Rng& rng) const override;
  double step(const StateVec& s, ActionId a, Rng& rng, StateVec& next) const override;

  static int state_index(const StateVec& s) { return static_cast<int>(s[0]); }
  static StateVec state_vec(int s) { return StateVec::Constant(1, static_cast<double>(s)); }

 private:
  MatX rewards_;
  MatX transitions_;
  VecX initial_dist_;
  double gamma_;
  double reward_noise_;
  double reward_bound_;
};

/// (𝒯f)(s,a) = r(s,a) + γ Σ_{s'} P(s'|s,a) max_{a'} f(s',a'), computed from
/// the tables.
TabularQFunction bellman_backup(const TabularMdp& mdp, const TabularQFunction& f);

/// Iterates 𝒯 from zero until successive iterates differ by at most `tol`
/// in sup norm. A negative `max_iters` selects
/// ⌈log(tol(1−γ)/(2M)) / log γ⌉ + 10. Throws ConvergenceError otherwise.
TabularQFunction value_iteration(const TabularMdp& mdp, double tol = 1e-10, int max_iters = -1);

int default_value_iteration_budget(const TabularMdp& mdp, double tol);

/// Lowest-index argmax in every row.
TabularPolicy greedy_policy(const TabularQFunction& q);

/// State-to-state transition matrix P_π.
MatX policy_transition_matrix(const TabularMdp& mdp, const TabularPolicy& policy);

/// r_π(s) = r(s, π(s)).
VecX policy_rewards(const TabularMdp& mdp, const TabularPolicy& policy);

/// Discounted occupancy d^π = (1−γ) μᵀ(I − γP_π)⁻¹. Dense solve up to
/// `kDenseOccupancyLimit` states; beyond that the series is summed until
/// γᵀ < 1e-14.
VecX exact_occupancy(const TabularMdp& mdp, const TabularPolicy& policy);

/// V^π(s) for every state.
VecX exact_state_values(const TabularMdp& mdp, const TabularPolicy& policy);

/// V^π = μᵀ(I − γP_π)⁻¹ r_π.
double exact_policy_value(const TabularMdp& mdp, const TabularPolicy& policy);

inline constexpr int kDenseOccupancyLimit = 2000;

nlohmann::json to_json(const TabularMdp& mdp);
TabularMdp tabular_mdp_from_json(const nlohmann::json& doc);

}  // namespace offrl
