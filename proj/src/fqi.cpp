#include "offrl/fqi.hpp"

#include <cmath>

namespace offrl {

LinearQFunction::LinearQFunction(FeatureMapPtr features, VecX weights, double ball_radius)
    : features_(std::move(features)), weights_(std::move(weights)), ball_radius_(ball_radius) {
  require(features_ != nullptr, "linear Q-function needs a feature map");
  require(weights_.size() == features_->dim(), "weight dimension must match the features");
}

double LinearQFunction::operator()(const StateVec& s, ActionId a) const {
  thread_local VecX phi;
  phi.resize(features_->dim());
  features_->eval(s, a, phi);
  return weights_.dot(phi);
}

VecX LinearQFunction::action_values(const StateVec& s) const {
  VecX out(num_actions());
  for (int a = 0; a < num_actions(); ++a) out[a] = (*this)(s, a);
  return out;
}

ActionId greedy_action(const LinearQFunction& q, const StateVec& s) {
  thread_local VecX phi;
  phi.resize(q.features()->dim());
  ActionId best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < q.num_actions(); ++a) {
    q.features()->eval(s, a, phi);
    const double v = q.weights().dot(phi);
    if (v > best_val) {
      best_val = v;
      best = a;
    }
  }
  return best;
}

ActionId greedy_action(const TabularQFunction& q, const StateVec& s) {
  const int si = TabularMdp::state_index(s);
  require(si >= 0 && si < q.rows(), "state index out of range for the Q-table");
  return argmax_lowest(q.row(si));
}

TabularPolicy tabulate_policy(const GreedyPolicy& policy, int num_states) {
  TabularPolicy pi(num_states);
  for (int s = 0; s < num_states; ++s) pi[s] = policy(TabularMdp::state_vec(s));
  return pi;
}

std::vector<VecX> fqi_iterates(const Dataset& data, const FeatureMap& features,
                               const FqiConfig& config) {
  require(config.iterations >= 1, "FQI needs K ≥ 1");
  require(config.ball_radius > 0.0, "ball radius must be positive");
  require(config.gamma >= 0.0 && config.gamma < 1.0, "discount must lie in [0, 1)");
  const Eigen::Index d = features.dim();
  const Eigen::Index n = data.size();
  const FeatureCache cache = build_feature_cache(data, features);
  const DesignStats stats = design_stats(cache.phi);
  const double tol =
      config.singular_tolerance >= 0.0 ? config.singular_tolerance : 1e-8 * static_cast<double>(n);
  bool solvable = false;
  Eigen::LLT<MatX> chol;
  MatX pinv;
  if (config.solver == OlsSolver::Exact) {
    solvable = stats.lambda_min > tol;
    if (solvable) chol.compute(stats.sigma_hat);
  } else {
    const Eigen::SelfAdjointEigenSolver<MatX> eig(stats.sigma_hat);
    const double top = eig.eigenvalues().maxCoeff();
    solvable = top > tol;
    if (solvable) {
      const ArrX lam = eig.eigenvalues().array();
      const VecX inv = (lam > 1e-10 * top).select(lam.inverse(), 0.0);
      pinv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    }
  }

  std::vector<VecX> iterates;
  iterates.reserve(static_cast<std::size_t>(config.iterations) + 1);
  VecX w = config.initial_weights.size() ? config.initial_weights : VecX(VecX::Zero(d));
  require(w.size() == d, "initial weights must match the feature dimension");
  iterates.push_back(w);
  for (int k = 1; k <= config.iterations; ++k) {
    const VecX y = data.rewards() + config.gamma * cache.next_max(w);
    for (Eigen::Index i = 0; i < n; ++i)
      if (!std::isfinite(y[i]))
        throw DataError("non-finite FQI target at sample " + std::to_string(i) + " in iteration " +
                        std::to_string(k));
    VecX w_ols = VecX::Zero(d);
    if (solvable) {
      const VecX rhs = cache.phi.transpose() * y;
      w_ols = config.solver == OlsSolver::Exact ? VecX(chol.solve(rhs)) : VecX(pinv * rhs);
    }
    w = project_to_ball(w_ols, config.ball_radius);
    iterates.push_back(w);
  }
  return iterates;
}

LinearQFunction fqi_fit(const Dataset& data, FeatureMapPtr features, const FqiConfig& config) {
  require(features != nullptr, "FQI needs a feature map");
  auto iterates = fqi_iterates(data, *features, config);
  return LinearQFunction(std::move(features), std::move(iterates.back()), config.ball_radius);
}

int min_iterations(double n, double lambda0, double d, double gamma) {
  require(n >= 1.0 && d >= 1.0, "n and d must be at least 1");
  require(lambda0 > 0.0 && lambda0 <= 1.0, "λ₀ must lie in (0, 1]");
  require(gamma > 0.0 && gamma < 1.0, "γ must lie in (0, 1)");
  const double ratio = lambda0 * lambda0 * n / ((72.0 * d) * (72.0 * d));
  const double k = std::log(ratio) / (2.0 * std::log(1.0 / gamma));
  // Guard against 10.000000000000002-style round-up of exact integers.
  const double rounded = std::round(k);
  const double kk = std::abs(k - rounded) < 1e-9 ? rounded : k;
  return static_cast<int>(std::ceil(std::max(1.0, kk)));
}

nlohmann::json weights_to_json(const LinearQFunction& q, int iterations) {
  nlohmann::json doc;
  doc["d"] = q.weights().size();
  doc["B"] = q.ball_radius();
  doc["K"] = iterations;
  doc["weights"] = std::vector<double>(q.weights().data(), q.weights().data() + q.weights().size());
  return doc;
}

}  // namespace offrl
