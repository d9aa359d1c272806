#include "offrl/margin.hpp"

#include <algorithm>
#include <cmath>

namespace offrl {

StateVec occupancy_sample(const MdpModel& mdp, const Policy& policy, Rng& rng) {
  const std::uint64_t T = geometric_variate(rng, 1.0 - mdp.discount());
  StateVec s = mdp.sample_initial(rng);
  StateVec next(mdp.state_dim());
  for (std::uint64_t t = 0; t < T; ++t) {
    mdp.step(s, policy(s), rng, next);
    s.swap(next);
  }
  return s;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  require(lo > 0.0 && hi > lo && count >= 2, "log grid needs 0 < lo < hi and ≥ 2 points");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  return out;
}

void fit_profile(MarginProfile& profile) {
  std::vector<double> xs, ys;
  for (std::size_t g = 0; g < profile.delta_grid.size(); ++g) {
    const double c = profile.cdf_values[g];
    if (c > 0.0 && c <= 0.5) {
      xs.push_back(std::log(profile.delta_grid[g]));
      ys.push_back(std::log(c));
    }
  }
  if (xs.size() < 2) {
    profile.alpha_infinite = true;
    profile.fitted_alpha = std::numeric_limits<double>::infinity();
    profile.fit_quality = 0.0;
    return;
  }
  const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
  const Eigen::Map<const VecX> x(xs.data(), m), y(ys.data(), m);
  const double xbar = x.mean(), ybar = y.mean();
  const double sxx = (x.array() - xbar).square().sum();
  const double sxy = ((x.array() - xbar) * (y.array() - ybar)).sum();
  const double syy = (y.array() - ybar).square().sum();
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;
  profile.fitted_alpha = slope;
  // log CDF = α log δ − α log δ₀.
  profile.fitted_delta0 = slope != 0.0 ? std::exp(-intercept / slope) : std::numeric_limits<double>::infinity();
  profile.fit_quality = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
}

MarginProfile estimate_profile(const MdpModel& mdp, const QOracle& qstar,
                               const std::vector<Policy>& policies, int samples_per_policy,
                               const std::vector<double>& delta_grid, std::uint64_t seed,
                               double tau) {
  require(!policies.empty(), "probe policy set must be nonempty");
  require(samples_per_policy >= 1, "need at least one occupancy sample per policy");
  require(!delta_grid.empty() && std::is_sorted(delta_grid.begin(), delta_grid.end()) &&
              delta_grid.front() > 0.0,
          "δ grid must be positive and increasing");
  MarginProfile profile;
  profile.delta_grid = delta_grid;
  profile.cdf_values.assign(delta_grid.size(), 0.0);
  double min_positive = std::numeric_limits<double>::infinity();
  bool any_positive = false;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    Rng rng(derive_seed(seed, p));
    std::vector<double> margins;
    margins.reserve(static_cast<std::size_t>(samples_per_policy));
    for (int i = 0; i < samples_per_policy; ++i) {
      const double m = margin_at(qstar, occupancy_sample(mdp, policies[p], rng), tau);
      if (m > 0.0) {
        margins.push_back(m);
        min_positive = std::min(min_positive, m);
      }
    }
    any_positive = any_positive || !margins.empty();
    std::sort(margins.begin(), margins.end());
    std::vector<double> cdf(delta_grid.size());
    for (std::size_t g = 0; g < delta_grid.size(); ++g) {
      const auto count = std::upper_bound(margins.begin(), margins.end(), delta_grid[g]) - margins.begin();
      cdf[g] = static_cast<double>(count) / samples_per_policy;
      profile.cdf_values[g] = std::max(profile.cdf_values[g], cdf[g]);
    }
    profile.per_policy_cdf.push_back(std::move(cdf));
  }
  if (!any_positive) {
    profile.degenerate = true;
    profile.fitted_alpha = std::numeric_limits<double>::quiet_NaN();
    profile.fitted_delta0 = std::numeric_limits<double>::quiet_NaN();
    return profile;
  }
  fit_profile(profile);
  if (profile.alpha_infinite) profile.fitted_delta0 = min_positive;
  return profile;
}

std::optional<double> tabular_delta0(const TabularQFunction& qstar, double gap_tolerance) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < qstar.rows(); ++s) {
    const double m = margin_of(qstar.row(s), gap_tolerance);
    if (m > 0.0) best = std::min(best, m);
  }
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

std::optional<double> linear_delta0(const MatX& betas, double mu_max) {
  require(mu_max > 0.0, "μ_max must be positive");
  double sum = 0.0;
  bool any = false;
  for (Eigen::Index a = 0; a < betas.rows(); ++a) {
    double worst = 0.0;
    for (Eigen::Index b = 0; b < betas.rows(); ++b) {
      if (b == a || betas.row(a) == betas.row(b)) continue;
      worst = std::max(worst, 1.0 / (betas.row(a) - betas.row(b)).norm());
      any = true;
    }
    sum += worst;
  }
  if (!any) return std::nullopt;
  return 1.0 / (6.0 * mu_max * sum);
}

nlohmann::json profile_summary_json(const MarginProfile& profile) {
  nlohmann::json doc;
  if (profile.degenerate) {
    doc["degenerate"] = true;
    return doc;
  }
  doc["alpha"] = profile.alpha_infinite ? nlohmann::json("inf") : nlohmann::json(profile.fitted_alpha);
  doc["delta0"] = profile.fitted_delta0;
  doc["r2"] = profile.fit_quality;
  return doc;
}

}  // namespace offrl
