#include "offrl/benchmark.hpp"

#include <cassert>
#include <cmath>

namespace offrl {

LinearMdp::LinearMdp(FeatureMapPtr features, VecX theta, std::vector<StateSampler> components,
                     StateSampler initial, Eigen::Index state_dim, double gamma,
                     double reward_bound, double reward_noise_sigma)
    : features_(std::move(features)),
      theta_(std::move(theta)),
      components_(std::move(components)),
      initial_(std::move(initial)),
      state_dim_(state_dim),
      gamma_(gamma),
      reward_bound_(reward_bound),
      reward_noise_sigma_(reward_noise_sigma) {
  require(features_ != nullptr, "linear MDP needs a feature map");
  require(theta_.size() == features_->dim(), "θ must match the feature dimension");
  require(static_cast<Eigen::Index>(components_.size()) == features_->dim(),
          "need one next-state measure per feature");
  require(gamma_ >= 0.0 && gamma_ < 1.0, "discount must lie in [0, 1)");
  require(reward_bound_ > 0.0, "reward bound must be positive");
  require(reward_noise_sigma_ >= 0.0, "reward noise must be ≥ 0");
}

double LinearMdp::mean_reward(const StateVec& s, ActionId a) const {
  return theta_.dot((*features_)(s, a));
}

StateVec LinearMdp::sample_initial(Rng& rng) const {
  StateVec s(state_dim_);
  initial_(rng, s);
  return s;
}

double LinearMdp::step(const StateVec& s, ActionId a, Rng& rng, StateVec& next) const {
  thread_local VecX phi;
  phi.resize(features_->dim());
  features_->eval(s, a, phi);
  assert(phi.norm() <= 1.0 + 1e-12);
  double r = theta_.dot(phi);
  if (reward_noise_sigma_ > 0.0) {
    // Redraw until the noisy reward respects the declared bound.
    double noisy = r + reward_noise_sigma_ * normal(rng);
    for (int tries = 0; std::abs(noisy) > reward_bound_ && tries < 64; ++tries)
      noisy = r + reward_noise_sigma_ * normal(rng);
    r = std::clamp(noisy, -reward_bound_, reward_bound_);
  }
  const Eigen::Index k = categorical_variate(rng, phi);
  components_[static_cast<std::size_t>(k)](rng, next);
  return r;
}

BenchmarkParams draw_benchmark_params(const BenchmarkSpec& spec) {
  Rng rng(spec.seed);
  BenchmarkParams p{VecX(6), MatX(6, 2), MatX(6, 2)};
  for (int i = 0; i < 6; ++i) p.theta[i] = rng.uniform();
  for (int k = 0; k < 6; ++k)
    for (int j = 0; j < 2; ++j) {
      p.alpha(k, j) = rng.uniform();
      p.beta(k, j) = rng.uniform();
    }
  return p;
}

LinearMdp build_benchmark(const BenchmarkSpec& spec) {
  return build_benchmark(draw_benchmark_params(spec), spec);
}

LinearMdp build_benchmark(const BenchmarkParams& params, const BenchmarkSpec& spec) {
  require(spec.gamma > 0.0 && spec.gamma < 1.0, "benchmark discount must lie in (0, 1)");
  require((params.alpha.array() > 0.0).all() && (params.beta.array() > 0.0).all(),
          "Beta shape parameters must be positive");
  std::vector<LinearMdp::StateSampler> components;
  for (int k = 0; k < 6; ++k) {
    const double a1 = 10.0 * params.alpha(k, 0), b1 = 10.0 * params.beta(k, 0);
    const double a2 = 10.0 * params.alpha(k, 1), b2 = 10.0 * params.beta(k, 1);
    components.emplace_back([=](Rng& rng, Eigen::Ref<VecX> out) {
      out[0] = beta_variate(rng, a1, b1);
      out[1] = beta_variate(rng, a2, b2);
    });
  }
  auto initial = [](Rng& rng, Eigen::Ref<VecX> out) {
    out[0] = rng.uniform();
    out[1] = rng.uniform();
  };
  return LinearMdp(std::make_shared<BenchmarkFeatures>(), params.theta, std::move(components),
                   initial, 2, spec.gamma, 1.0, spec.reward_noise_sigma);
}

nlohmann::json to_json(const BenchmarkParams& params, const BenchmarkSpec& spec) {
  nlohmann::json doc;
  doc["seed"] = spec.seed;
  doc["gamma"] = spec.gamma;
  doc["generator"] = "splitmix64";
  doc["draw_order"] = "theta1..theta6, then alpha_k1, beta_k1, alpha_k2, beta_k2 for k = 1..6";
  doc["theta"] = std::vector<double>(params.theta.data(), params.theta.data() + 6);
  nlohmann::json comps = nlohmann::json::array();
  for (int k = 0; k < 6; ++k) {
    comps.push_back({{"alpha", {params.alpha(k, 0), params.alpha(k, 1)}},
                     {"beta", {params.beta(k, 0), params.beta(k, 1)}}});
  }
  doc["components"] = comps;
  return doc;
}

VecX benchmark_q_star_weights(const BenchmarkParams& params, double gamma,
                              Eigen::Index samples_per_component, std::uint64_t seed) {
  require(samples_per_component >= 1, "need at least one sample per component");
  const Eigen::Index m = samples_per_component;
  std::vector<ArrX> s1(6, ArrX(m)), s2(6, ArrX(m));
  for (int k = 0; k < 6; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    for (Eigen::Index i = 0; i < m; ++i) {
      s1[k][i] = beta_variate(rng, 10.0 * params.alpha(k, 0), 10.0 * params.beta(k, 0));
      s2[k][i] = beta_variate(rng, 10.0 * params.alpha(k, 1), 10.0 * params.beta(k, 1));
    }
  }
  // max_{a'} wᵀφ(s',a') = (max(w₁s₁ + w₄s₂, w₂s₁ + w₅s₂) + w₃(1−s₁) + w₆(1−s₂)) / 2
  VecX w = params.theta;
  for (int it = 0; it < 10000; ++it) {
    VecX next = params.theta;
    for (int k = 0; k < 6; ++k) {
      const ArrX v = (w[0] * s1[k] + w[3] * s2[k]).max(w[1] * s1[k] + w[4] * s2[k]) +
                     w[2] * (1.0 - s1[k]) + w[5] * (1.0 - s2[k]);
      next[k] += gamma * 0.5 * v.mean();
    }
    const double change = (next - w).cwiseAbs().maxCoeff();
    w = std::move(next);
    if (change <= 1e-13) return w;
  }
  throw ConvergenceError("benchmark Q* fixed point did not converge", 0.0);
}

double action_one_share(const VecX& w, int resolution) {
  require(w.size() == 6, "benchmark weights have six entries");
  require(resolution >= 1, "resolution must be positive");
  const double u1 = w[1] - w[0], u2 = w[4] - w[3];
  long count = 0;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      const double s1 = (i + 0.5) / resolution, s2 = (j + 0.5) / resolution;
      if (u1 * s1 + u2 * s2 > 0.0) ++count;
    }
  return static_cast<double>(count) / (static_cast<double>(resolution) * resolution);
}

std::uint64_t select_benchmark_seed(std::uint64_t start, double gamma, double min_share,
                                    int max_tries, Eigen::Index samples_per_component) {
  require(min_share > 0.0 && min_share < 0.5, "min_share must lie in (0, 0.5)");
  for (int t = 0; t < max_tries; ++t) {
    BenchmarkSpec spec;
    spec.seed = start + static_cast<std::uint64_t>(t);
    spec.gamma = gamma;
    const VecX w = benchmark_q_star_weights(draw_benchmark_params(spec), gamma, samples_per_component);
    const double share = action_one_share(w);
    if (share >= min_share && share <= 1.0 - min_share) return spec.seed;
  }
  throw InvalidArgument("no benchmark seed with an interior decision boundary in range");
}

TabularMdp random_tabular(std::uint64_t seed, int num_states, int num_actions,
                          double reward_bound, double concentration, double gamma) {
  require(num_states >= 1 && num_actions >= 1, "need at least one state and action");
  require(reward_bound > 0.0, "reward bound must be positive");
  require(concentration > 0.0, "Dirichlet concentration must be positive");
  Rng rng(seed);
  MatX rewards(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) rewards(s, a) = rng.uniform(-reward_bound, reward_bound);
  const Eigen::Index SA = static_cast<Eigen::Index>(num_states) * num_actions;
  MatX transitions(SA, num_states);
  for (Eigen::Index row = 0; row < SA; ++row) {
    VecX p = dirichlet_variate(rng, num_states, concentration);
    // Renormalize so the row sum is exactly representable as 1 within 1e-12.
    p /= p.sum();
    transitions.row(row) = p.transpose();
  }
  VecX mu = VecX::Constant(num_states, 1.0 / num_states);
  return TabularMdp(std::move(rewards), std::move(transitions), std::move(mu), gamma);
}

}  // namespace offrl
