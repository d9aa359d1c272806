#pragma once

#include "offrl/features.hpp"
#include "offrl/mdp.hpp"

#include <functional>
#include <string>

namespace offrl {

struct TransitionSample {
  StateVec state;
  ActionId action = 0;
  double reward = 0.0;
  StateVec next_state;
};

/// Joint sampler over (s, a) pairs, the behavior distribution μ_b.
using BehaviorSampler = std::function<void(Rng&, Eigen::Ref<VecX> state, ActionId& action)>;

/// s ~ μ of `mdp`, a uniform over actions. For the benchmark this is
/// Uniform([0,1]²) × Bernoulli(0.5).
BehaviorSampler initial_times_uniform_action(const MdpModel& mdp);

/// Uniform over all (s, a) cells of a finite MDP.
BehaviorSampler uniform_tabular_behavior(int num_states, int num_actions);

/// n iid transitions, stored column-major: row i of `states`/`next_states`
/// is sample i.
class Dataset {
 public:
  Dataset(MatX states, Eigen::VectorXi actions, VecX rewards, MatX next_states,
          std::uint64_t seed, std::string behavior_id);

  Eigen::Index size() const { return rewards_.size(); }
  Eigen::Index state_dim() const { return states_.cols(); }

  const MatX& states() const { return states_; }
  const Eigen::VectorXi& actions() const { return actions_; }
  const VecX& rewards() const { return rewards_; }
  const MatX& next_states() const { return next_states_; }
  std::uint64_t seed() const { return seed_; }
  const std::string& behavior_id() const { return behavior_id_; }

  TransitionSample sample(Eigen::Index i) const {
    return {states_.row(i).transpose(), actions_[i], rewards_[i], next_states_.row(i).transpose()};
  }

  bool operator==(const Dataset& other) const;

 private:
  MatX states_;
  Eigen::VectorXi actions_;
  VecX rewards_;
  MatX next_states_;
  std::uint64_t seed_;
  std::string behavior_id_;
};

/// Draws (sᵢ, aᵢ) ~ μ_b and then (rᵢ, s'ᵢ) from the model, for i = 1..n,
/// from `Rng(seed)`.
Dataset draw_dataset(const MdpModel& mdp, const BehaviorSampler& behavior, Eigen::Index n,
                     std::uint64_t seed, std::string behavior_id = "uniform");

/// Features evaluated once per fit: `phi` is n × d, `next_phi[a]` holds
/// φ(s'ᵢ, a) row-wise.
struct FeatureCache {
  MatX phi;
  std::vector<MatX> next_phi;

  /// Row-wise max_a wᵀφ(s'ᵢ, a); `argmax` receives the lowest maximizing
  /// action if non-null.
  VecX next_max(const VecX& w, Eigen::VectorXi* argmax = nullptr) const;
};

FeatureCache build_feature_cache(const Dataset& data, const FeatureMap& features);

struct DesignStats {
  MatX sigma_hat;  // Σ φᵢφᵢᵀ
  double lambda_min = 0.0;
  Eigen::Index n = 0;
};

/// Σ̂ and its smallest eigenvalue (symmetric tridiagonal QL solve).
DesignStats design_stats(const Dataset& data, const FeatureMap& features);
DesignStats design_stats(const MatX& phi);

void write_dataset_csv(const Dataset& data, const std::string& csv_path);
Dataset read_dataset_csv(const std::string& csv_path);

}  // namespace offrl
