#pragma once
// Small models with closed-form answers, shared by unit and acceptance tests.

#include "offrl/margin.hpp"
#include "offrl/mdp.hpp"

namespace fixture {

// States uniform on [0,1]² at every step regardless of the action, zero
// reward, two actions. Every occupancy measure is the uniform law.
class UniformSquareMdp final : public offrl::MdpModel {
 public:
  explicit UniformSquareMdp(double gamma) : gamma_(gamma) {}
  int num_actions() const override { return 2; }
  Eigen::Index state_dim() const override { return 2; }
  double discount() const override { return gamma_; }
  double reward_bound() const override { return 1.0; }
  offrl::StateVec sample_initial(offrl::Rng& rng) const override {
    offrl::StateVec s(2);
    s << rng.uniform(), rng.uniform();
    return s;
  }
  double step(const offrl::StateVec&, offrl::ActionId, offrl::Rng& rng,
              offrl::StateVec& next) const override {
    next << rng.uniform(), rng.uniform();
    return 0.0;
  }

 private:
  double gamma_;
};

// Q(s, a) = a·s₁, so Δ(s) = s₁ and P(0 < Δ ≤ δ) = δ on [0, 1].
inline offrl::QOracle uniform_margin_oracle() {
  return [](const offrl::StateVec& s) {
    offrl::VecX q(2);
    q << 0.0, s[0];
    return q;
  };
}

}  // namespace fixture
