#include "offrl/policy_eval.hpp"

#include <cmath>

namespace offrl {

double stable_sum(const std::vector<double>& xs) {
  double sum = 0.0, comp = 0.0;
  for (const double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

namespace {

struct MeanAndError {
  double mean;
  double std_error;
};

MeanAndError summarize(const std::vector<double>& xs) {
  const double m = static_cast<double>(xs.size());
  const double mean = stable_sum(xs) / m;
  if (xs.size() < 2) return {mean, 0.0};
  std::vector<double> sq;
  sq.reserve(xs.size());
  for (const double x : xs) sq.push_back((x - mean) * (x - mean));
  const double var = stable_sum(sq) / (m - 1.0);
  return {mean, std::sqrt(var / m)};
}

double truncation_bound(const MdpModel& mdp, int horizon) {
  const double g = mdp.discount();
  return std::pow(g, horizon) * mdp.reward_bound() / (1.0 - g);
}

void check_config(const EvalConfig& config) {
  require(config.horizon >= 1, "evaluation horizon must be at least 1");
  require(config.num_initial_states >= 1, "need at least one evaluation rollout");
}

}  // namespace

double rollout_return(const MdpModel& mdp, const Policy& policy, int horizon, std::uint64_t seed,
                      std::uint64_t index) {
  Rng init_rng(derive_seed(seed, index, 0));
  StateVec s = mdp.sample_initial(init_rng);
  StateVec next(mdp.state_dim());
  const double gamma = mdp.discount();
  double ret = 0.0, disc = 1.0;
  for (int t = 0; t < horizon; ++t) {
    Rng step_rng(derive_seed(seed, index, static_cast<std::uint64_t>(t) + 1));
    ret += disc * mdp.step(s, policy(s), step_rng, next);
    disc *= gamma;
    s.swap(next);
  }
  return ret;
}

std::vector<double> rollout_returns(const MdpModel& mdp, const Policy& policy,
                                    const EvalConfig& config) {
  check_config(config);
  std::vector<double> out(static_cast<std::size_t>(config.num_initial_states));
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = rollout_return(mdp, policy, config.horizon, config.seed, j);
  return out;
}

McValue mc_policy_value(const MdpModel& mdp, const Policy& policy, const EvalConfig& config) {
  const auto s = summarize(rollout_returns(mdp, policy, config));
  return {s.mean, s.std_error, truncation_bound(mdp, config.horizon)};
}

GreedyPolicy reference_optimal(const MdpModel& mdp, FeatureMapPtr features,
                               const BehaviorSampler& behavior, const ReferenceConfig& config) {
  const Dataset data = draw_dataset(mdp, behavior, config.n, config.seed, "reference");
  FqiConfig fqi;
  fqi.iterations = config.iterations;
  fqi.ball_radius = config.ball_radius;
  fqi.gamma = mdp.discount();
  fqi.solver = config.solver;
  return GreedyPolicy(fqi_fit(data, std::move(features), fqi));
}

GreedyPolicy reference_optimal(const TabularMdp& mdp) {
  return GreedyPolicy(value_iteration(mdp, 1e-12));
}

RegretEstimate estimate_regret(const MdpModel& mdp, const Policy& policy,
                               const std::vector<double>& reference_returns,
                               const EvalConfig& config) {
  check_config(config);
  require(reference_returns.size() == static_cast<std::size_t>(config.num_initial_states),
          "reference returns must match the evaluation size");
  std::vector<double> pi_returns = rollout_returns(mdp, policy, config);
  std::vector<double> diffs(pi_returns.size());
  for (std::size_t j = 0; j < diffs.size(); ++j) diffs[j] = reference_returns[j] - pi_returns[j];
  const auto d = summarize(diffs);
  RegretEstimate out;
  out.v_star_hat = stable_sum(reference_returns) / static_cast<double>(reference_returns.size());
  out.v_pi_hat = stable_sum(pi_returns) / static_cast<double>(pi_returns.size());
  out.regret = d.mean;
  out.std_error = d.std_error;
  out.truncation_bias_bound = truncation_bound(mdp, config.horizon);
  return out;
}

RegretEstimate estimate_regret(const MdpModel& mdp, const Policy& policy, const Policy& reference,
                               const EvalConfig& config) {
  return estimate_regret(mdp, policy, rollout_returns(mdp, reference, config), config);
}

RegretEstimate estimate_regret(const TabularMdp& mdp, const TabularPolicy& policy,
                               const TabularPolicy& reference) {
  RegretEstimate out;
  out.v_star_hat = exact_policy_value(mdp, reference);
  out.v_pi_hat = policy == reference ? out.v_star_hat : exact_policy_value(mdp, policy);
  out.regret = out.v_star_hat - out.v_pi_hat;
  return out;
}

}  // namespace offrl
