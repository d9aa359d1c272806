#include "offrl/dataset.hpp"

#include "offrl/io.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace offrl {

BehaviorSampler initial_times_uniform_action(const MdpModel& mdp) {
  // Captures by reference: the model must outlive the sampler.
  const MdpModel* model = &mdp;
  return [model](Rng& rng, Eigen::Ref<VecX> state, ActionId& action) {
    state = model->sample_initial(rng);
    action = static_cast<ActionId>(rng.below(static_cast<std::uint64_t>(model->num_actions())));
  };
}

BehaviorSampler uniform_tabular_behavior(int num_states, int num_actions) {
  require(num_states >= 1 && num_actions >= 1, "need |S|, |A| ≥ 1");
  return [num_states, num_actions](Rng& rng, Eigen::Ref<VecX> state, ActionId& action) {
    const std::uint64_t cell =
        rng.below(static_cast<std::uint64_t>(num_states) * static_cast<std::uint64_t>(num_actions));
    state[0] = static_cast<double>(cell / static_cast<std::uint64_t>(num_actions));
    action = static_cast<ActionId>(cell % static_cast<std::uint64_t>(num_actions));
  };
}

Dataset::Dataset(MatX states, Eigen::VectorXi actions, VecX rewards, MatX next_states,
                 std::uint64_t seed, std::string behavior_id)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      rewards_(std::move(rewards)),
      next_states_(std::move(next_states)),
      seed_(seed),
      behavior_id_(std::move(behavior_id)) {
  const Eigen::Index n = rewards_.size();
  require(n >= 1, "a dataset needs at least one sample");
  require(states_.rows() == n && actions_.size() == n && next_states_.rows() == n,
          "dataset columns must have equal length");
  require(states_.cols() == next_states_.cols(), "state and next-state widths differ");
}

bool Dataset::operator==(const Dataset& other) const {
  return seed_ == other.seed_ && behavior_id_ == other.behavior_id_ &&
         states_.rows() == other.states_.rows() && states_.cols() == other.states_.cols() &&
         states_ == other.states_ && actions_ == other.actions_ && rewards_ == other.rewards_ &&
         next_states_ == other.next_states_;
}

Dataset draw_dataset(const MdpModel& mdp, const BehaviorSampler& behavior, Eigen::Index n,
                     std::uint64_t seed, std::string behavior_id) {
  require(n >= 1, "dataset size must be at least 1");
  const Eigen::Index sd = mdp.state_dim();
  MatX states(n, sd), next_states(n, sd);
  Eigen::VectorXi actions(n);
  VecX rewards(n);
  Rng rng(seed);
  StateVec s(sd), sp(sd);
  for (Eigen::Index i = 0; i < n; ++i) {
    ActionId a = 0;
    behavior(rng, s, a);
    rewards[i] = mdp.step(s, a, rng, sp);
    states.row(i) = s.transpose();
    actions[i] = a;
    next_states.row(i) = sp.transpose();
  }
  return Dataset(std::move(states), std::move(actions), std::move(rewards),
                 std::move(next_states), seed, std::move(behavior_id));
}

VecX FeatureCache::next_max(const VecX& w, Eigen::VectorXi* argmax) const {
  VecX best = next_phi.front() * w;
  if (argmax) argmax->setZero(best.size());
  for (std::size_t a = 1; a < next_phi.size(); ++a) {
    const VecX v = next_phi[a] * w;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v[i] > best[i]) {
        best[i] = v[i];
        if (argmax) (*argmax)[i] = static_cast<int>(a);
      }
    }
  }
  return best;
}

FeatureCache build_feature_cache(const Dataset& data, const FeatureMap& features) {
  const Eigen::Index n = data.size();
  const Eigen::Index d = features.dim();
  FeatureCache cache{MatX(n, d), std::vector<MatX>(static_cast<std::size_t>(features.num_actions()), MatX(n, d))};
  VecX buf(d);
  StateVec s(data.state_dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    s = data.states().row(i).transpose();
    features.eval(s, data.actions()[i], buf);
    cache.phi.row(i) = buf.transpose();
    s = data.next_states().row(i).transpose();
    for (int a = 0; a < features.num_actions(); ++a) {
      features.eval(s, a, buf);
      cache.next_phi[static_cast<std::size_t>(a)].row(i) = buf.transpose();
    }
  }
  return cache;
}

DesignStats design_stats(const MatX& phi) {
  for (Eigen::Index i = 0; i < phi.rows(); ++i)
    if (!phi.row(i).allFinite())
      throw DataError("non-finite feature vector at sample " + std::to_string(i));
  DesignStats out;
  out.n = phi.rows();
  out.sigma_hat = MatX(phi.cols(), phi.cols());
  out.sigma_hat.setZero();
  out.sigma_hat.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
  out.sigma_hat = out.sigma_hat.selfadjointView<Eigen::Lower>();
  Eigen::SelfAdjointEigenSolver<MatX> eig(out.sigma_hat, Eigen::EigenvaluesOnly);
  out.lambda_min = eig.eigenvalues().minCoeff();
  return out;
}

DesignStats design_stats(const Dataset& data, const FeatureMap& features) {
  const Eigen::Index n = data.size();
  MatX phi(n, features.dim());
  VecX buf(features.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    features.eval(data.states().row(i).transpose(), data.actions()[i], buf);
    phi.row(i) = buf.transpose();
  }
  return design_stats(phi);
}

void write_dataset_csv(const Dataset& data, const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot open " + csv_path + " for writing");
  const Eigen::Index sd = data.state_dim();
  for (Eigen::Index j = 0; j < sd; ++j) out << 's' << j << ',';
  out << "a,r";
  for (Eigen::Index j = 0; j < sd; ++j) out << ",sp" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < sd; ++j) out << format_double(data.states()(i, j)) << ',';
    out << data.actions()[i] << ',' << format_double(data.rewards()[i]);
    for (Eigen::Index j = 0; j < sd; ++j) out << ',' << format_double(data.next_states()(i, j));
    out << '\n';
  }
  std::ofstream side(csv_path + ".json");
  nlohmann::json meta;
  meta["n"] = data.size();
  meta["seed"] = data.seed();
  meta["behavior_id"] = data.behavior_id();
  side << meta.dump(2) << '\n';
}

Dataset read_dataset_csv(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty dataset file " + csv_path);
  const auto header = split(trim(line), ',');
  // Header is s0..s{k-1}, a, r, sp0..sp{k-1}.
  if (header.size() < 4 || (header.size() - 2) % 2 != 0)
    throw DataError("unexpected dataset header in " + csv_path);
  const std::size_t sd = (header.size() - 2) / 2;
  if (header[sd] != "a" || header[sd + 1] != "r") throw DataError("dataset header lacks a,r columns");

  std::vector<std::vector<double>> rows;
  std::vector<int> acts;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cells = split(t, ',');
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(rows.size() + 1) + " has the wrong number of fields");
    std::vector<double> vals;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j == sd) {
        acts.push_back(static_cast<int>(parse_integer(cells[j])));
        vals.push_back(0.0);
      } else {
        vals.push_back(parse_double(cells[j]));
      }
    }
    rows.push_back(std::move(vals));
  }
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index k = static_cast<Eigen::Index>(sd);
  MatX states(n, k), next(n, k);
  Eigen::VectorXi actions(n);
  VecX rewards(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < k; ++j) {
      states(i, j) = r[static_cast<std::size_t>(j)];
      next(i, j) = r[sd + 2 + static_cast<std::size_t>(j)];
    }
    actions[i] = acts[static_cast<std::size_t>(i)];
    rewards[i] = r[sd + 1];
  }

  std::uint64_t seed = 0;
  std::string behavior_id = "unknown";
  std::ifstream side(csv_path + ".json");
  if (side) {
    const auto meta = nlohmann::json::parse(side);
    seed = meta.value("seed", std::uint64_t{0});
    behavior_id = meta.value("behavior_id", std::string("unknown"));
    if (meta.contains("n") && meta["n"].get<Eigen::Index>() != n)
      throw DataError("sidecar n does not match the CSV row count");
  }
  return Dataset(std::move(states), std::move(actions), std::move(rewards), std::move(next), seed,
                 std::move(behavior_id));
}

}  // namespace offrl
