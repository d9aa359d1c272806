#include "doctest.h"

#include "offrl/benchmark.hpp"
#include "offrl/policy_eval.hpp"

#include <algorithm>
#include <cmath>

using namespace offrl;

namespace {

TabularPolicy to_policy(std::initializer_list<int> xs) {
  TabularPolicy p(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (const int x : xs) p[i++] = x;
  return p;
}

Policy as_policy(const TabularPolicy& pi) {
  return [pi](const StateVec& s) { return pi[TabularMdp::state_index(s)]; };
}

}  // namespace

TEST_CASE("zero rewards give zero value and zero error") {
  const TabularMdp m(MatX::Zero(3, 2), MatX::Constant(6, 3, 1.0 / 3), VecX::Constant(3, 1.0 / 3), 0.9);
  const McValue v = mc_policy_value(m, as_policy(to_policy({0, 1, 0})), EvalConfig{500, 20, 1});
  CHECK(v.value == 0.0);
  CHECK(v.std_error == 0.0);
}

TEST_CASE("single rewarding state gives the truncated geometric sum") {
  const TabularMdp m(MatX::Ones(1, 1), MatX::Ones(1, 1), VecX::Ones(1), 0.9);
  const McValue v = mc_policy_value(m, as_policy(to_policy({0})), EvalConfig{100, 50, 3});
  CHECK(v.value == doctest::Approx((1.0 - std::pow(0.9, 50)) / 0.1).epsilon(1e-13));
  CHECK(v.std_error < 1e-12);
  CHECK(v.truncation_bias_bound == doctest::Approx(std::pow(0.9, 50) / 0.1));
}

TEST_CASE("Monte-Carlo values bracket exact tabular values") {
  int bracketed = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const TabularMdp m = random_tabular(static_cast<std::uint64_t>(t), 4, 2, 1.0, 1.0, 0.8);
    Rng rng(static_cast<std::uint64_t>(t) + 500);
    TabularPolicy pi(4);
    for (int s = 0; s < 4; ++s) pi[s] = static_cast<int>(rng.below(2));
    const McValue v = mc_policy_value(m, as_policy(pi), EvalConfig{2000, 60, static_cast<std::uint64_t>(t)});
    const double exact = exact_policy_value(m, pi);
    if (std::abs(v.value - exact) <= 4.0 * v.std_error + v.truncation_bias_bound) ++bracketed;
  }
  CHECK(bracketed >= 99);
}

TEST_CASE("truncation bias is within its bound") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TabularMdp m = random_tabular(seed, 5, 2, 1.0, 1.0, 0.9);
    const TabularPolicy pi = greedy_policy(value_iteration(m));
    // Expected truncated return by propagating the state distribution.
    VecX p = m.initial_dist();
    const MatX P = policy_transition_matrix(m, pi);
    const VecX r = policy_rewards(m, pi);
    double truncated = 0.0, disc = 1.0;
    const int H = 20;
    for (int t = 0; t < H; ++t) {
      truncated += disc * p.dot(r);
      p = P.transpose() * p;
      disc *= 0.9;
    }
    CHECK(std::abs(truncated - exact_policy_value(m, pi)) <= std::pow(0.9, H) * 1.0 / 0.1 + 1e-12);
  }
}

TEST_CASE("tabular reference is the greedy policy of value iteration") {
  const TabularMdp m = random_tabular(4, 5, 3, 1.0, 1.0);
  const GreedyPolicy ref = reference_optimal(m);
  const TabularPolicy star = greedy_policy(value_iteration(m, 1e-12));
  for (int s = 0; s < 5; ++s) CHECK(ref(TabularMdp::state_vec(s)) == star[s]);
}

TEST_CASE("zero discount reference is the argmax of the fitted reward") {
  const TabularMdp m = random_tabular(8, 4, 3, 1.0, 1.0, 0.0);
  ReferenceConfig rc;
  rc.n = 3000;
  rc.iterations = 5;
  const GreedyPolicy ref =
      reference_optimal(m, std::make_shared<OneHotFeatures>(4, 3), uniform_tabular_behavior(4, 3), rc);
  for (int s = 0; s < 4; ++s) {
    Eigen::Index best;
    m.rewards().row(s).maxCoeff(&best);
    CHECK(ref(TabularMdp::state_vec(s)) == best);
  }
}

TEST_CASE("independent benchmark references agree almost everywhere") {
  BenchmarkSpec spec;
  spec.seed = select_benchmark_seed();
  const LinearMdp m = build_benchmark(spec);
  const auto behavior = initial_times_uniform_action(m);
  ReferenceConfig a, b;
  a.solver = b.solver = OlsSolver::MinimumNorm;
  a.seed = 1;
  b.seed = 2;
  const GreedyPolicy pa = reference_optimal(m, m.features(), behavior, a);
  const GreedyPolicy pb = reference_optimal(m, m.features(), behavior, b);
  Rng rng(3);
  int agree = 0;
  for (int i = 0; i < 10000; ++i) {
    const VecX s = m.sample_initial(rng);
    agree += pa(s) == pb(s);
  }
  CHECK(agree >= 9900);
}

TEST_CASE("a policy has zero regret against itself") {
  const LinearMdp m = build_benchmark(BenchmarkSpec{});
  const Policy p = [](const StateVec& s) { return s[0] + 0.3 > s[1] ? 1 : 0; };
  const RegretEstimate r = estimate_regret(m, p, p, EvalConfig{500, 30, 9});
  CHECK(r.regret == 0.0);
  CHECK(r.std_error == 0.0);
  CHECK(r.v_star_hat == r.v_pi_hat);
}

TEST_CASE("exact tabular regret of the anti-optimal policy") {
  const TabularMdp m = random_tabular(12, 5, 2, 1.0, 1.0);
  const MatX q = value_iteration(m, 1e-13);
  const TabularPolicy star = greedy_policy(q);
  TabularPolicy worst(5);
  for (int s = 0; s < 5; ++s) q.row(s).minCoeff(&worst[s]);
  const RegretEstimate r = estimate_regret(m, worst, star);
  // Independent path: values from the state-value solve averaged over μ.
  const double gap = m.initial_dist().dot(exact_state_values(m, star) - exact_state_values(m, worst));
  CHECK(r.regret == doctest::Approx(gap).epsilon(1e-12));
  CHECK(r.regret > 0.0);
  CHECK(r.std_error == 0.0);
}

TEST_CASE("benchmark FQI regret is positive and shrinks with n") {
  BenchmarkSpec spec;
  spec.seed = select_benchmark_seed();
  const LinearMdp m = build_benchmark(spec);
  const auto behavior = initial_times_uniform_action(m);
  ReferenceConfig rc;
  rc.solver = OlsSolver::MinimumNorm;
  const GreedyPolicy reference = reference_optimal(m, m.features(), behavior, rc);
  const EvalConfig ec{4000, 50, 5};
  const auto ref_returns = rollout_returns(m, reference, ec);
  std::vector<double> medians;
  for (const Eigen::Index n : {64, 512}) {
    std::vector<double> regrets;
    for (std::uint64_t rep = 0; rep < 40; ++rep) {
      FqiConfig fc;
      fc.solver = OlsSolver::MinimumNorm;
      const GreedyPolicy pi(fqi_fit(draw_dataset(m, behavior, n, 77 + rep * 1000 + n), m.features(), fc));
      regrets.push_back(estimate_regret(m, pi, ref_returns, ec).regret);
    }
    if (n == 512) {
      const auto positive = std::count_if(regrets.begin(), regrets.end(), [](double r) { return r > 0.0; });
      CHECK(positive >= 38);
    }
    std::sort(regrets.begin(), regrets.end());
    medians.push_back(0.5 * (regrets[19] + regrets[20]));
  }
  CHECK(medians[1] < medians[0]);
}

TEST_CASE("compensated summation") {
  std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  CHECK(stable_sum(xs) == 2.0);
  std::vector<double> tenths(10, 0.1);
  CHECK(stable_sum(tenths) == 1.0);
}
