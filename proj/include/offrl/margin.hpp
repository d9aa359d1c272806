#pragma once

#include "offrl/features.hpp"
#include "offrl/mdp.hpp"
#include "offrl/tabular.hpp"

#include "json.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace offrl {

/// Action values (Q*(s,0), …, Q*(s,|A|−1)) at a state.
using QOracle = std::function<VecX(const StateVec&)>;

inline constexpr double kDefaultTieTolerance = 1e-9;

/// Δ for one vector of action values: best value minus the best value
/// outside the argmax set, or 0 when every action is within `tau` of the
/// best.
template <typename Derived>
double margin_of(const Eigen::DenseBase<Derived>& q, double tau = kDefaultTieTolerance) {
  const double best = q.maxCoeff();
  double runner_up = -std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < q.size(); ++a)
    if (q[a] < best - tau) runner_up = std::max(runner_up, static_cast<double>(q[a]));
  return std::isfinite(runner_up) ? best - runner_up : 0.0;
}

inline double margin_at(const QOracle& qstar, const StateVec& s, double tau = kDefaultTieTolerance) {
  return margin_of(qstar(s), tau);
}

/// Exact draw from d^π: T ~ Geometric(1−γ) on {0,1,…}, then s_T of a
/// rollout from s₀ ~ μ.
StateVec occupancy_sample(const MdpModel& mdp, const Policy& policy, Rng& rng);

struct MarginProfile {
  std::vector<double> delta_grid;
  /// max over probe policies of the empirical P(0 < Δ ≤ δ), per grid point.
  std::vector<double> cdf_values;
  /// Row p holds the empirical CDF of probe policy p.
  std::vector<std::vector<double>> per_policy_cdf;
  double fitted_alpha = 0.0;
  double fitted_delta0 = 0.0;
  /// R² of the log-log regression.
  double fit_quality = 0.0;
  /// Every sampled margin was zero; no fit.
  bool degenerate = false;
  /// Too few grid points carry mass to fit; reported as α = +∞ with δ₀ the
  /// smallest positive margin observed.
  bool alpha_infinite = false;
};

/// Empirical margin profile. CDFs are estimated from `samples_per_policy`
/// occupancy draws per policy; (α, δ₀) come from OLS of log CDF on log δ over
/// grid points whose CDF lies in (0, 0.5].
MarginProfile estimate_profile(const MdpModel& mdp, const QOracle& qstar,
                               const std::vector<Policy>& policies, int samples_per_policy,
                               const std::vector<double>& delta_grid, std::uint64_t seed,
                               double tau = kDefaultTieTolerance);

/// Fit of a profile whose CDF values are already known.
void fit_profile(MarginProfile& profile);

/// `count` log-spaced points from `lo` to `hi`.
std::vector<double> log_grid(double lo, double hi, int count);

/// Smallest positive per-state margin of a Q-table: the largest δ₀ for which
/// the margin condition holds with α = ∞. Empty when every state is fully
/// tied.
std::optional<double> tabular_delta0(const TabularQFunction& qstar,
                                     double gap_tolerance = kDefaultTieTolerance);

/// δ₀ = (6 μ_max Σ_a max_{a': β_a ≠ β_a'} ‖β_a − β_a'‖⁻¹)⁻¹ for
/// Q*(s,a) = β_aᵀψ(s); row a of `betas` is β_a. Empty when all rows are equal.
std::optional<double> linear_delta0(const MatX& betas, double mu_max);

nlohmann::json profile_summary_json(const MarginProfile& profile);

}  // namespace offrl
