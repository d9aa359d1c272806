#include "offrl/msbo.hpp"

#include <cmath>
#include <limits>

namespace offrl {

namespace {

// Everything about the empirical objective that does not depend on q.
class MsboProblem {
 public:
  MsboProblem(const Dataset& data, const FeatureMap& features, double zeta, double witness_bound,
              double gamma, bool discounted)
      : data_(data),
        cache_(build_feature_cache(data, features)),
        zeta_(zeta),
        witness_bound_(witness_bound),
        residual_gamma_(discounted ? gamma : 1.0) {
    require(zeta > 0.0, "ζ must be positive");
    require(witness_bound > 0.0, "witness bound must be positive");
    const DesignStats stats = design_stats(cache_.phi);
    sigma_ = stats.sigma_hat;
    // Pseudo-inverse restricted to the column space of the design.
    Eigen::SelfAdjointEigenSolver<MatX> eig(sigma_);
    const VecX& ev = eig.eigenvalues();
    const double cutoff = 1e-10 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    VecX inv = VecX::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev[i] > cutoff) inv[i] = 1.0 / ev[i];
    sigma_pinv_ = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    c_ = cache_.phi.transpose() * data.rewards();
  }

  Eigen::Index dim() const { return cache_.phi.cols(); }
  double n() const { return static_cast<double>(data_.size()); }

  struct Eval {
    InnerMax inner;
    Eigen::VectorXi argmax;
    VecX b;
  };

  Eval evaluate(const VecX& v) const {
    Eval e;
    const VecX residual = data_.rewards() - cache_.phi * v +
                          residual_gamma_ * cache_.next_max(v, &e.argmax);
    e.b = cache_.phi.transpose() * residual;
    VecX u = sigma_pinv_ * e.b / (2.0 * zeta_);
    const double norm = u.norm();
    if (norm > witness_bound_) u *= witness_bound_ / norm;
    e.inner.value = e.b.dot(u) - zeta_ * u.dot(sigma_ * u);
    e.inner.witness = std::move(u);
    return e;
  }

  // ∂b/∂v on the piece where the next-state argmax is `argmax`.
  MatX jacobian(const Eigen::VectorXi& argmax) const {
    MatX next_active(cache_.phi.rows(), dim());
    for (Eigen::Index i = 0; i < next_active.rows(); ++i)
      next_active.row(i) = cache_.next_phi[static_cast<std::size_t>(argmax[i])].row(i);
    return -sigma_ + residual_gamma_ * cache_.phi.transpose() * next_active;
  }

  // Danskin: the gradient of max_u L(v, u) is ∂L/∂v at the maximizer.
  VecX subgradient(const Eval& e) const { return jacobian(e.argmax).transpose() * e.inner.witness; }

  // Minimizer of bᵀΣ̂⁺b on the current piece, b(v) = c + Jv.
  VecX gauss_newton_target(const Eval& e) const {
    const MatX J = jacobian(e.argmax);
    const MatX H = J.transpose() * sigma_pinv_ * J;
    const VecX g = J.transpose() * sigma_pinv_ * c_;
    return -H.completeOrthogonalDecomposition().solve(g);
  }

 private:
  const Dataset& data_;
  FeatureCache cache_;
  MatX sigma_;
  MatX sigma_pinv_;
  VecX c_;
  double zeta_;
  double witness_bound_;
  double residual_gamma_;
};

VecX random_in_ball(Rng& rng, Eigen::Index d, double radius) {
  VecX dir(d);
  for (Eigen::Index i = 0; i < d; ++i) dir[i] = normal(rng);
  const double norm = dir.norm();
  if (norm == 0.0) return VecX::Zero(d);
  return dir * (radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / norm);
}

struct RestartResult {
  VecX v;
  MsboProblem::Eval eval;
  int steps = 0;
  bool converged = false;
};

RestartResult run_restart(const MsboProblem& prob, VecX v, const MsboConfig& config) {
  const double eta0 =
      config.step_size > 0.0 ? config.step_size : 1.0 / (prob.n() * std::max(1.0, config.weight_bound));
  const double floor = 1e-14 * std::max(1.0, prob.n());
  v = project_to_ball(v, config.weight_bound);
  RestartResult best{v, prob.evaluate(v), 0, false};
  if (best.eval.inner.value <= floor) {
    best.converged = true;
    return best;
  }
  MsboProblem::Eval cur = best.eval;
  for (int t = 0; t < config.outer_steps; ++t) {
    VecX next;
    MsboProblem::Eval next_eval;
    bool accepted = false;
    if (config.method == MsboMethod::GaussNewton) {
      const VecX dir = prob.gauss_newton_target(cur) - v;
      for (double step = 1.0; step > 1e-6; step *= 0.5) {
        next = project_to_ball(v + step * dir, config.weight_bound);
        next_eval = prob.evaluate(next);
        if (next_eval.inner.value < cur.inner.value) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      const double eta = eta0 / std::sqrt(static_cast<double>(t) + 1.0);
      next = project_to_ball(v - eta * prob.subgradient(cur), config.weight_bound);
      next_eval = prob.evaluate(next);
    }
    const double change = (next - v).norm();
    v = std::move(next);
    cur = std::move(next_eval);
    best.steps = t + 1;
    if (cur.inner.value < best.eval.inner.value) {
      best.v = v;
      best.eval = cur;
    }
    if (change < config.tolerance || best.eval.inner.value <= floor) {
      best.converged = true;
      break;
    }
  }
  return best;
}

}  // namespace

InnerMax inner_max(const Dataset& data, const FeatureMap& features, const VecX& q_weights,
                   double zeta, double witness_bound, double gamma, bool discounted_residual) {
  const MsboProblem prob(data, features, zeta, witness_bound, gamma, discounted_residual);
  require(q_weights.size() == prob.dim(), "q weights must match the feature dimension");
  return prob.evaluate(q_weights).inner;
}

MsboSolution msbo_fit(const Dataset& data, const FeatureMap& features, const MsboConfig& config) {
  require(config.weight_bound > 0.0, "weight bound must be positive");
  require(config.outer_steps >= 0 && config.restarts >= 1, "need outer_steps ≥ 0 and restarts ≥ 1");
  const MsboProblem prob(data, features, config.zeta, config.witness_bound, config.gamma,
                         config.discounted_residual);
  const Eigen::Index d = prob.dim();
  const double init_radius =
      config.init_radius >= 0.0 ? config.init_radius : std::min(config.weight_bound, 1.0);

  MsboSolution sol;
  sol.final_objective = std::numeric_limits<double>::infinity();
  sol.converged = false;
  const double floor = 1e-14 * std::max(1.0, prob.n());
  for (int r = 0; r < config.restarts; ++r) {
    VecX start;
    if (r == 0) {
      start = config.initial_weights.size() ? config.initial_weights : VecX(VecX::Zero(d));
      require(start.size() == d, "initial weights must match the feature dimension");
    } else {
      Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
      start = random_in_ball(rng, d, init_radius);
    }
    RestartResult res = run_restart(prob, std::move(start), config);
    sol.iterations_used += res.steps;
    sol.converged = sol.converged || res.converged;
    // Strict improvement keeps the lowest restart index on ties.
    if (res.eval.inner.value < sol.final_objective) {
      sol.final_objective = res.eval.inner.value;
      sol.q_weights = res.v;
      sol.witness_weights = res.eval.inner.witness;
      sol.best_restart = r;
    }
    if (sol.final_objective <= floor) break;
  }
  return sol;
}

nlohmann::json msbo_to_json(const MsboSolution& sol, const MsboConfig& config) {
  nlohmann::json doc;
  doc["d"] = sol.q_weights.size();
  doc["B"] = config.weight_bound;
  doc["K"] = sol.iterations_used;
  doc["weights"] = std::vector<double>(sol.q_weights.data(), sol.q_weights.data() + sol.q_weights.size());
  doc["zeta"] = config.zeta;
  doc["final_objective"] = sol.final_objective;
  doc["restarts"] = config.restarts;
  return doc;
}

}  // namespace offrl
