#pragma once

#include "offrl/dataset.hpp"
#include "offrl/features.hpp"
#include "offrl/tabular.hpp"

#include "json.hpp"

#include <variant>
#include <vector>

namespace offrl {

/// Lowest index attaining the maximum.
template <typename Derived>
ActionId argmax_lowest(const Eigen::DenseBase<Derived>& values) {
  ActionId best = 0;
  for (Eigen::Index a = 1; a < values.size(); ++a)
    if (values[a] > values[best]) best = static_cast<ActionId>(a);
  return best;
}

/// f(s,a) = wᵀφ(s,a) with ‖w‖ ≤ B.
class LinearQFunction {
 public:
  LinearQFunction(FeatureMapPtr features, VecX weights, double ball_radius);

  const VecX& weights() const { return weights_; }
  const FeatureMapPtr& features() const { return features_; }
  double ball_radius() const { return ball_radius_; }
  int num_actions() const { return features_->num_actions(); }

  double operator()(const StateVec& s, ActionId a) const;
  /// (f(s,0), …, f(s,|A|−1)).
  VecX action_values(const StateVec& s) const;

 private:
  FeatureMapPtr features_;
  VecX weights_;
  double ball_radius_;
};

/// Greedy action of a linear Q-function, lowest index on ties.
ActionId greedy_action(const LinearQFunction& q, const StateVec& s);
/// Greedy action of a tabular Q-function at the state encoded in `s`.
ActionId greedy_action(const TabularQFunction& q, const StateVec& s);

/// π_f(s) ∈ argmax_a f(s,a); ties go to the lowest action index.
class GreedyPolicy {
 public:
  explicit GreedyPolicy(LinearQFunction q) : q_(std::move(q)) {}
  explicit GreedyPolicy(TabularQFunction q) : q_(std::move(q)) {}

  ActionId operator()(const StateVec& s) const {
    return std::visit([&](const auto& q) { return greedy_action(q, s); }, q_);
  }

  static constexpr const char* tie_break() { return "lowest-index"; }

  bool is_tabular() const { return std::holds_alternative<TabularQFunction>(q_); }
  const LinearQFunction& linear() const { return std::get<LinearQFunction>(q_); }
  const TabularQFunction& tabular() const { return std::get<TabularQFunction>(q_); }

 private:
  std::variant<LinearQFunction, TabularQFunction> q_;
};

/// Greedy tabular policy of a linear Q-function over one-hot features.
TabularPolicy tabulate_policy(const GreedyPolicy& policy, int num_states);

/// How each OLS step is solved. `Exact` follows the textbook rule: solve
/// Σ̂w = Φᵀy when λ_min(Σ̂) clears the tolerance, else return zero weights.
/// `MinimumNorm` uses the pseudo-inverse of Σ̂, which is what a rank-deficient
/// feature map needs (the benchmark's six features span only five
/// dimensions); it falls back to zero only when Σ̂ itself is negligible.
enum class OlsSolver { Exact, MinimumNorm };

struct FqiConfig {
  int iterations = 50;
  /// Radius B of the weight ball.
  double ball_radius = 1e6;
  double gamma = 0.9;
  /// λ_min(Σ̂) must exceed this for the OLS branch; negative selects 1e-8·n.
  double singular_tolerance = -1.0;
  /// f̂₀ weights; empty means zero.
  VecX initial_weights;
  OlsSolver solver = OlsSolver::Exact;
};

/// Linear fitted Q-iteration: K rounds of OLS on bootstrapped targets,
/// zero fallback on a singular design, projection onto the B-ball.
LinearQFunction fqi_fit(const Dataset& data, FeatureMapPtr features, const FqiConfig& config);

/// Same iteration, returning the weights of f̂₀, …, f̂_K.
std::vector<VecX> fqi_iterates(const Dataset& data, const FeatureMap& features,
                               const FqiConfig& config);

/// Scales `w` into the Euclidean ball of the given radius.
inline VecX project_to_ball(const VecX& w, double radius) {
  const double norm = w.norm();
  return norm > radius ? VecX(w * (radius / norm)) : w;
}

/// ⌈max(1, log(λ₀²n/(72d)²) / (2 log(1/γ)))⌉, the iteration count from
/// which the uniform FQI error bound applies.
int min_iterations(double n, double lambda0, double d, double gamma);

nlohmann::json weights_to_json(const LinearQFunction& q, int iterations);

}  // namespace offrl
