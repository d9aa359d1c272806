#pragma once

#include "offrl/features.hpp"
#include "offrl/mdp.hpp"
#include "offrl/tabular.hpp"

#include "json.hpp"

#include <functional>
#include <vector>

namespace offrl {

/// Linear MDP: r(s,a) = θᵀφ(s,a) and P(·|s,a) = Σ_k φ_k(s,a) ν_k, where φ
/// takes values in the probability simplex so that sampling a component
/// k ~ φ(s,a) and then s' ~ ν_k reproduces the transition law.
class LinearMdp final : public MdpModel {
 public:
  /// Writes one draw into the preallocated state vector.
  using StateSampler = std::function<void(Rng&, Eigen::Ref<VecX>)>;

  LinearMdp(FeatureMapPtr features, VecX theta, std::vector<StateSampler> components,
            StateSampler initial, Eigen::Index state_dim, double gamma, double reward_bound,
            double reward_noise_sigma = 0.0);

  int num_actions() const override { return features_->num_actions(); }
  Eigen::Index state_dim() const override { return state_dim_; }
  double discount() const override { return gamma_; }
  double reward_bound() const override { return reward_bound_; }

  const FeatureMapPtr& features() const { return features_; }
  const VecX& theta() const { return theta_; }

  double mean_reward(const StateVec& s, ActionId a) const;

  StateVec sample_initial(Rng& rng) const override;
  double step(const StateVec& s, ActionId a, Rng& rng, StateVec& next) const override;

 private:
  FeatureMapPtr features_;
  VecX theta_;
  std::vector<StateSampler> components_;
  StateSampler initial_;
  Eigen::Index state_dim_;
  double gamma_;
  double reward_bound_;
  double reward_noise_sigma_;
};

struct BenchmarkSpec {
  std::uint64_t seed = 0;
  double gamma = 0.9;
  /// Standard deviation of optional Gaussian reward noise; 0 keeps rewards
  /// at their mean θᵀφ.
  double reward_noise_sigma = 0.0;
};

/// The 30 uniforms that define the benchmark instance. Component k,
/// coordinate j of the next-state mixture is Beta(10·alpha(k,j), 10·beta(k,j)).
struct BenchmarkParams {
  VecX theta;  // 6
  MatX alpha;  // 6 × 2
  MatX beta;   // 6 × 2
};

/// Draws θ₁..θ₆ and then α₁₁, β₁₁, α₁₂, β₁₂, α₂₁, … (component-major) as
/// the first 30 Uniform(0,1) variates of `Rng(spec.seed)`.
BenchmarkParams draw_benchmark_params(const BenchmarkSpec& spec);

/// μ = Uniform([0,1]²), two actions, six simplex features, γ from the spec.
/// Rewards lie in [0, 1] because θ ∈ [0,1]⁶ and φ is in the simplex, so the
/// declared bound is M = 1.
LinearMdp build_benchmark(const BenchmarkSpec& spec);
LinearMdp build_benchmark(const BenchmarkParams& params, const BenchmarkSpec& spec);

nlohmann::json to_json(const BenchmarkParams& params, const BenchmarkSpec& spec);

/// Weights w* with Q*(s,a) = w*ᵀφ(s,a) for the benchmark, computed from the
/// model rather than from data: every ν_k is replaced by a fixed sample of
/// `samples_per_component` draws and w ← θ + γ (E_{ν_k} max_{a'} wᵀφ(s',a'))_k
/// is iterated to its fixed point.
VecX benchmark_q_star_weights(const BenchmarkParams& params, double gamma,
                              Eigen::Index samples_per_component = 1 << 18,
                              std::uint64_t seed = 0x5eed);

/// Fraction of the unit square where action 1 is strictly better under the
/// benchmark Q-function with weights `w`, on a midpoint grid of
/// `resolution`² cells.
double action_one_share(const VecX& w, int resolution = 400);

/// First seed from `start` upward whose Q* decision boundary crosses the
/// interior of the state square, leaving each action at least `min_share` of
/// it. Instances failing this have no real decision problem (seed 0 prefers
/// action 0 everywhere) and regret is identically zero.
std::uint64_t select_benchmark_seed(std::uint64_t start = 0, double gamma = 0.9,
                                    double min_share = 0.1, int max_tries = 1000,
                                    Eigen::Index samples_per_component = 1 << 16);

/// Random finite MDP: rewards iid Uniform(−M, M), transition rows iid
/// symmetric Dirichlet(concentration), uniform initial distribution.
TabularMdp random_tabular(std::uint64_t seed, int num_states, int num_actions,
                          double reward_bound, double concentration, double gamma = 0.9);

}  // namespace offrl
