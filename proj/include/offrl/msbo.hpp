#pragma once

#include "offrl/dataset.hpp"
#include "offrl/features.hpp"
#include "offrl/fqi.hpp"

#include "json.hpp"

namespace offrl {

enum class MsboMethod {
  /// Gauss–Newton step on the active quadratic piece with backtracking,
  /// subgradient step when no decrease is found.
  GaussNewton,
  /// Plain projected subgradient descent with η_t = η₀/√(t+1).
  Subgradient,
};

struct MsboConfig {
  double zeta = 0.5;
  /// Euclidean radius for the q-class coefficients (‖θ‖ ≤ M' implies
  /// ‖θᵀφ‖∞ ≤ M' when ‖φ‖ ≤ 1).
  double weight_bound = 10.0;
  double witness_bound = 10.0;
  double gamma = 0.9;
  int outer_steps = 200;
  /// η₀; negative selects 1/(n·max(1, weight_bound)).
  double step_size = -1.0;
  int restarts = 5;
  double tolerance = 1e-10;
  MsboMethod method = MsboMethod::GaussNewton;
  /// Use rᵢ − q(sᵢ,aᵢ) + γ max q(s'ᵢ,·); false drops γ from the max term.
  bool discounted_residual = true;
  /// Start of restart 0; empty means zero. Restarts ≥ 1 start uniformly in
  /// the ball of radius `init_radius` (negative: min(weight_bound, 1)).
  VecX initial_weights;
  double init_radius = -1.0;
  std::uint64_t seed = 0;
};

struct MsboSolution {
  VecX q_weights;
  double final_objective = 0.0;
  VecX witness_weights;
  int iterations_used = 0;
  int best_restart = 0;
  /// False when every restart ran out of outer steps.
  bool converged = true;
};

struct InnerMax {
  VecX witness;
  double value = 0.0;
};

/// max over witnesses w = uᵀφ of Σᵢ (δᵢ(q) w(sᵢ,aᵢ) − ζ w(sᵢ,aᵢ)²), where
/// δᵢ is the Bellman residual of q at sample i. The unconstrained maximizer
/// is u* = Σ̂⁺b/(2ζ) with b = Σᵢ φᵢδᵢ; if ‖u*‖ exceeds the witness bound it
/// is scaled back onto the ball.
InnerMax inner_max(const Dataset& data, const FeatureMap& features, const VecX& q_weights,
                   double zeta, double witness_bound, double gamma,
                   bool discounted_residual = true);

/// min over ‖v‖ ≤ Bq of the inner maximum, best over restarts.
MsboSolution msbo_fit(const Dataset& data, const FeatureMap& features, const MsboConfig& config);

nlohmann::json msbo_to_json(const MsboSolution& sol, const MsboConfig& config);

}  // namespace offrl
