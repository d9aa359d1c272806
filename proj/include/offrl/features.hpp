#pragma once

#include "offrl/types.hpp"

#include <memory>

namespace offrl {

/// φ : S × A → ℝᵈ.
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;

  virtual Eigen::Index dim() const = 0;
  virtual int num_actions() const = 0;
  virtual void eval(const StateVec& s, ActionId a, Eigen::Ref<VecX> out) const = 0;

  VecX operator()(const StateVec& s, ActionId a) const {
    VecX out(dim());
    eval(s, a, out);
    return out;
  }
};

using FeatureMapPtr = std::shared_ptr<const FeatureMap>;

/// φ(s,a) = (s₁(1−a), s₁a, 1−s₁, s₂(1−a), s₂a, 1−s₂)/2 on [0,1]² × {0,1}.
/// Entries are nonnegative and sum to one.
template <typename Scalar, typename Derived>
Vec<Scalar> benchmark_features(const Eigen::MatrixBase<Derived>& s, ActionId a) {
  if (s.size() != 2) throw InvalidArgument("benchmark states are two-dimensional");
  if (a != 0 && a != 1) throw InvalidArgument("benchmark actions are 0 or 1");
  const Scalar s1 = s[0];
  const Scalar s2 = s[1];
  if (!(s1 >= Scalar(0) && s1 <= Scalar(1) && s2 >= Scalar(0) && s2 <= Scalar(1)))
    throw InvalidArgument("benchmark state coordinates must lie in [0, 1]");
  const Scalar act = static_cast<Scalar>(a);
  Vec<Scalar> phi(6);
  phi << s1 * (Scalar(1) - act), s1 * act, Scalar(1) - s1, s2 * (Scalar(1) - act), s2 * act,
      Scalar(1) - s2;
  return phi / Scalar(2);
}

class BenchmarkFeatures final : public FeatureMap {
 public:
  Eigen::Index dim() const override { return 6; }
  int num_actions() const override { return 2; }
  void eval(const StateVec& s, ActionId a, Eigen::Ref<VecX> out) const override {
    out = benchmark_features<double>(s, a);
  }
};

/// Indicator features of the pair (s, a) for a finite MDP; d = |S|·|A| and
/// coordinate s·|A|+a is the one that fires.
class OneHotFeatures final : public FeatureMap {
 public:
  OneHotFeatures(int num_states, int num_actions)
      : num_states_(num_states), num_actions_(num_actions) {
    require(num_states >= 1 && num_actions >= 1, "one-hot features need |S|, |A| ≥ 1");
  }
  Eigen::Index dim() const override {
    return static_cast<Eigen::Index>(num_states_) * num_actions_;
  }
  int num_actions() const override { return num_actions_; }
  int num_states() const { return num_states_; }
  void eval(const StateVec& s, ActionId a, Eigen::Ref<VecX> out) const override {
    const int si = static_cast<int>(s[0]);
    require(si >= 0 && si < num_states_ && a >= 0 && a < num_actions_,
            "one-hot feature index out of range");
    out.setZero();
    out[static_cast<Eigen::Index>(si) * num_actions_ + a] = 1.0;
  }

 private:
  int num_states_;
  int num_actions_;
};

}  // namespace offrl
