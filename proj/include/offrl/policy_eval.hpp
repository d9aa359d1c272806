#pragma once

#include "offrl/dataset.hpp"
#include "offrl/fqi.hpp"
#include "offrl/mdp.hpp"
#include "offrl/tabular.hpp"

#include <vector>

namespace offrl {

struct EvalConfig {
  int num_initial_states = 40000;
  int horizon = 50;
  std::uint64_t seed = 0;
};

struct McValue {
  double value = 0.0;
  double std_error = 0.0;
  /// γ^H·M/(1−γ): the most the truncated sum can differ from V^π.
  double truncation_bias_bound = 0.0;
};

struct RegretEstimate {
  double v_star_hat = 0.0;
  double v_pi_hat = 0.0;
  double regret = 0.0;
  double std_error = 0.0;
  double truncation_bias_bound = 0.0;
};

/// Truncated discounted return of rollout `index`. The initial state and
/// every transition draw their randomness from independent substreams keyed
/// by (seed, index, t), so two policies evaluated with the same key see the
/// same noise at every step: their paths coincide until the actions differ
/// and can merge again afterwards.
double rollout_return(const MdpModel& mdp, const Policy& policy, int horizon, std::uint64_t seed,
                      std::uint64_t index);

/// Returns of rollouts 0..m−1 under `config`.
std::vector<double> rollout_returns(const MdpModel& mdp, const Policy& policy,
                                    const EvalConfig& config);

/// Mean of `config.num_initial_states` truncated rollouts from s₀ ~ μ and
/// its standard error.
McValue mc_policy_value(const MdpModel& mdp, const Policy& policy, const EvalConfig& config);

struct ReferenceConfig {
  Eigen::Index n = 40000;
  int iterations = 100;
  double ball_radius = 1e6;
  std::uint64_t seed = 0;
  OlsSolver solver = OlsSolver::Exact;
};

/// π* surrogate for a continuous model: greedy policy of FQI fitted on an
/// independent dataset drawn from `behavior`.
GreedyPolicy reference_optimal(const MdpModel& mdp, FeatureMapPtr features,
                               const BehaviorSampler& behavior, const ReferenceConfig& config);

/// Exact π* of a finite MDP: greedy policy of value-iteration Q*.
GreedyPolicy reference_optimal(const TabularMdp& mdp);

/// V̂* − V̂^π by Monte Carlo with common random numbers.
RegretEstimate estimate_regret(const MdpModel& mdp, const Policy& policy, const Policy& reference,
                               const EvalConfig& config);

/// As above with the reference returns computed beforehand (they depend
/// only on the reference policy and `config`).
RegretEstimate estimate_regret(const MdpModel& mdp, const Policy& policy,
                               const std::vector<double>& reference_returns,
                               const EvalConfig& config);

/// Exact regret of a finite MDP from the occupancy identity; std_error 0.
RegretEstimate estimate_regret(const TabularMdp& mdp, const TabularPolicy& policy,
                               const TabularPolicy& reference);

/// Neumaier-compensated sum.
double stable_sum(const std::vector<double>& xs);

}  // namespace offrl
