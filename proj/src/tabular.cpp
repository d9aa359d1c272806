#include "offrl/tabular.hpp"

#include <cmath>
#include <sstream>

namespace offrl {

namespace {

constexpr double kRowSumTol = 1e-12;

void validate_distribution(const Eigen::Ref<const VecX>& p, const std::string& what) {
  if (!p.allFinite() || (p.array() < 0.0).any())
    throw InvalidArgument(what + " has a negative or non-finite entry");
  if (std::abs(p.sum() - 1.0) > kRowSumTol) {
    std::ostringstream msg;
    msg << what << " sums to " << p.sum() << ", expected 1";
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

TabularMdp::TabularMdp(MatX rewards, MatX transitions, VecX initial_dist, double gamma,
                       double reward_noise)
    : rewards_(std::move(rewards)),
      transitions_(std::move(transitions)),
      initial_dist_(std::move(initial_dist)),
      gamma_(gamma),
      reward_noise_(reward_noise) {
  const Eigen::Index S = rewards_.rows();
  const Eigen::Index A = rewards_.cols();
  require(S >= 1 && A >= 1, "tabular MDP needs at least one state and one action");
  require(transitions_.rows() == S * A && transitions_.cols() == S,
          "transition table must be (|S|·|A|) × |S|");
  require(initial_dist_.size() == S, "initial distribution must have |S| entries");
  require(gamma_ >= 0.0 && gamma_ < 1.0, "discount must lie in [0, 1)");
  require(reward_noise_ >= 0.0 && std::isfinite(reward_noise_), "reward noise must be finite and ≥ 0");
  require(rewards_.allFinite(), "rewards must be finite");
  for (Eigen::Index row = 0; row < S * A; ++row)
    validate_distribution(transitions_.row(row).transpose(),
                          "transition row " + std::to_string(row));
  validate_distribution(initial_dist_, "initial distribution");
  reward_bound_ = rewards_.cwiseAbs().maxCoeff() + reward_noise_;
}

StateVec TabularMdp::sample_initial(Rng& rng) const {
  return state_vec(static_cast<int>(categorical_variate(rng, initial_dist_)));
}

double TabularMdp::step(const StateVec& s, ActionId a, Rng& rng, StateVec& next) const {
  const int si = state_index(s);
  next[0] = static_cast<double>(categorical_variate(rng, transition_row(si, a)));
  double r = rewards_(si, a);
  if (reward_noise_ > 0.0) r += rng.uniform(-reward_noise_, reward_noise_);
  return r;
}

TabularQFunction bellman_backup(const TabularMdp& mdp, const TabularQFunction& f) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  if (f.rows() != S || f.cols() != A)
    throw InvalidArgument("Q-function dimensions do not match the MDP");
  const VecX v = f.rowwise().maxCoeff();
  const VecX pv = mdp.transitions() * v;
  // Row s·A+a of the transition table maps to entry (s, a).
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      cont(pv.data(), S, A);
  return mdp.rewards() + mdp.discount() * cont;
}

int default_value_iteration_budget(const TabularMdp& mdp, double tol) {
  const double gamma = mdp.discount();
  const double M = mdp.rewards().cwiseAbs().maxCoeff();
  if (gamma <= 0.0 || M <= 0.0) return 11;
  const double k = std::log(tol * (1.0 - gamma) / (2.0 * M)) / std::log(gamma);
  return static_cast<int>(std::ceil(std::max(k, 1.0))) + 10;
}

TabularQFunction value_iteration(const TabularMdp& mdp, double tol, int max_iters) {
  require(tol > 0.0, "value iteration tolerance must be positive");
  if (max_iters < 0) max_iters = default_value_iteration_budget(mdp, tol);
  TabularQFunction q = TabularQFunction::Zero(mdp.num_states(), mdp.num_actions());
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    TabularQFunction next = bellman_backup(mdp, q);
    residual = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    // ‖q − 𝒯q‖ ≤ γ·residual ≤ tol from here on.
    if (residual <= tol) return q;
  }
  std::ostringstream msg;
  msg << "value iteration did not converge in " << max_iters << " iterations (residual "
      << residual << ")";
  throw ConvergenceError(msg.str(), residual);
}

TabularPolicy greedy_policy(const TabularQFunction& q) {
  TabularPolicy pi(q.rows());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    Eigen::Index best = 0;
    q.row(s).maxCoeff(&best);  // first maximal index
    pi[s] = static_cast<int>(best);
  }
  return pi;
}

MatX policy_transition_matrix(const TabularMdp& mdp, const TabularPolicy& policy) {
  const int S = mdp.num_states();
  require(policy.size() == S, "policy must assign an action to every state");
  MatX P(S, S);
  for (int s = 0; s < S; ++s) {
    require(policy[s] >= 0 && policy[s] < mdp.num_actions(), "policy action out of range");
    P.row(s) = mdp.transition_row(s, policy[s]);
  }
  return P;
}

VecX policy_rewards(const TabularMdp& mdp, const TabularPolicy& policy) {
  VecX r(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) r[s] = mdp.rewards()(s, policy[s]);
  return r;
}

namespace {

// Solves xᵀ(I − γP) = bᵀ, i.e. (I − γP)ᵀ x = b.
VecX solve_left(const MatX& P, double gamma, const VecX& b) {
  const Eigen::Index S = P.rows();
  if (S <= kDenseOccupancyLimit) {
    const MatX lhs = MatX::Identity(S, S) - gamma * P.transpose();
    Eigen::PartialPivLU<MatX> lu(lhs);
    VecX x = lu.solve(b);
    if (!x.allFinite()) throw std::logic_error("occupancy system is singular");
    return x;
  }
  // Σ_t γᵗ (Pᵀ)ᵗ b until γᵗ drops below 1e-14.
  VecX term = b;
  VecX acc = b;
  double g = 1.0;
  while (g > 1e-14) {
    term = gamma * (P.transpose() * term);
    acc += term;
    g *= gamma;
  }
  return acc;
}

}  // namespace

VecX exact_occupancy(const TabularMdp& mdp, const TabularPolicy& policy) {
  const MatX P = policy_transition_matrix(mdp, policy);
  const double gamma = mdp.discount();
  return (1.0 - gamma) * solve_left(P, gamma, mdp.initial_dist());
}

VecX exact_state_values(const TabularMdp& mdp, const TabularPolicy& policy) {
  const MatX P = policy_transition_matrix(mdp, policy);
  const VecX r = policy_rewards(mdp, policy);
  const Eigen::Index S = P.rows();
  const double gamma = mdp.discount();
  if (S <= kDenseOccupancyLimit) {
    const MatX lhs = MatX::Identity(S, S) - gamma * P;
    return Eigen::PartialPivLU<MatX>(lhs).solve(r);
  }
  VecX acc = r;
  VecX term = r;
  for (double g = 1.0; g > 1e-14; g *= gamma) {
    term = gamma * (P * term);
    acc += term;
  }
  return acc;
}

double exact_policy_value(const TabularMdp& mdp, const TabularPolicy& policy) {
  const VecX d = exact_occupancy(mdp, policy);
  return d.dot(policy_rewards(mdp, policy)) / (1.0 - mdp.discount());
}

nlohmann::json to_json(const TabularMdp& mdp) {
  const auto flat = [](const MatX& m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
    return out;
  };
  nlohmann::json doc;
  doc["num_states"] = mdp.num_states();
  doc["num_actions"] = mdp.num_actions();
  doc["rewards"] = flat(mdp.rewards());
  doc["transitions"] = flat(mdp.transitions());
  doc["initial_dist"] = std::vector<double>(mdp.initial_dist().data(),
                                            mdp.initial_dist().data() + mdp.num_states());
  doc["gamma"] = mdp.discount();
  if (mdp.reward_noise() > 0.0) doc["reward_noise"] = mdp.reward_noise();
  return doc;
}

TabularMdp tabular_mdp_from_json(const nlohmann::json& doc) {
  try {
    const int S = doc.at("num_states").get<int>();
    const int A = doc.at("num_actions").get<int>();
    require(S >= 1 && A >= 1, "num_states and num_actions must be positive");
    const auto rewards = doc.at("rewards").get<std::vector<double>>();
    const auto transitions = doc.at("transitions").get<std::vector<double>>();
    const auto init = doc.at("initial_dist").get<std::vector<double>>();
    const std::size_t SA = static_cast<std::size_t>(S) * static_cast<std::size_t>(A);
    require(rewards.size() == SA, "rewards must have num_states·num_actions entries");
    require(transitions.size() == SA * static_cast<std::size_t>(S),
            "transitions must have num_states²·num_actions entries");
    require(init.size() == static_cast<std::size_t>(S), "initial_dist must have num_states entries");
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    MatX r = Eigen::Map<const RowMat>(rewards.data(), S, A);
    MatX p = Eigen::Map<const RowMat>(transitions.data(), S * A, S);
    VecX mu = Eigen::Map<const VecX>(init.data(), S);
    return TabularMdp(std::move(r), std::move(p), std::move(mu), doc.at("gamma").get<double>(),
                      doc.value("reward_noise", 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed tabular MDP document: ") + e.what());
  }
}

}  // namespace offrl
