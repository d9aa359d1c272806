#include "doctest.h"
#include "oracles.hpp"

#include "offrl/benchmark.hpp"
#include "offrl/fqi.hpp"

#include <cmath>

using namespace offrl;

namespace {

FeatureMapPtr bench_features() { return std::make_shared<BenchmarkFeatures>(); }

}  // namespace

TEST_CASE("one FQI step with zero discount is ordinary least squares") {
  const LinearMdp m = build_benchmark(BenchmarkSpec{});
  const Dataset d = draw_dataset(m, initial_times_uniform_action(m), 400, 3);
  // Full-rank design: drop the redundant sixth coordinate via a custom map.
  struct FiveFeatures final : FeatureMap {
    Eigen::Index dim() const override { return 5; }
    int num_actions() const override { return 2; }
    void eval(const StateVec& s, ActionId a, Eigen::Ref<VecX> out) const override {
      out = benchmark_features<double>(s, a).head(5);
    }
  };
  auto features = std::make_shared<FiveFeatures>();
  FqiConfig c;
  c.iterations = 1;
  c.gamma = 0.0;
  const VecX w = fqi_fit(d, features, c).weights();

  MatX phi(400, 5);
  for (int i = 0; i < 400; ++i) phi.row(i) = (*features)(d.states().row(i).transpose(), d.actions()[i]).transpose();
  const VecX ols = phi.householderQr().solve(d.rewards());
  CHECK((w - ols).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("singular design falls back to zero weights") {
  const int n = 20;
  MatX states = MatX::Zero(n, 1);
  const Dataset d(states, Eigen::VectorXi::Zero(n), VecX::Ones(n), states, 0, "one-cell");
  FqiConfig c;
  c.singular_tolerance = 1e-8;
  c.iterations = 3;
  const VecX w = fqi_fit(d, std::make_shared<OneHotFeatures>(2, 2), c).weights();
  CHECK(w == VecX::Zero(4));
}

TEST_CASE("the benchmark design is singular so the exact solver returns zero") {
  const LinearMdp m = build_benchmark(BenchmarkSpec{});
  const Dataset d = draw_dataset(m, initial_times_uniform_action(m), 1000, 4);
  FqiConfig c;
  CHECK(fqi_fit(d, bench_features(), c).weights() == VecX::Zero(6));
  c.solver = OlsSolver::MinimumNorm;
  CHECK(fqi_fit(d, bench_features(), c).weights().norm() > 1.0);
}

TEST_CASE("minimum-norm and exact solvers agree on full-rank designs") {
  const TabularMdp m = random_tabular(6, 4, 2, 1.0, 1.0);
  const Dataset d = draw_dataset(m, uniform_tabular_behavior(4, 2), 500, 2);
  auto features = std::make_shared<OneHotFeatures>(4, 2);
  FqiConfig exact;
  exact.iterations = 30;
  FqiConfig pinv = exact;
  pinv.solver = OlsSolver::MinimumNorm;
  CHECK((fqi_fit(d, features, exact).weights() - fqi_fit(d, features, pinv).weights())
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("one-hot FQI equals empirical-model Q-iteration") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TabularMdp m = random_tabular(seed, 4, 3, 1.0, 1.0, 0.9);
    const Dataset d = draw_dataset(m, uniform_tabular_behavior(4, 3), 600, seed + 10);
    FqiConfig c;
    c.iterations = 25;
    const VecX w = fqi_fit(d, std::make_shared<OneHotFeatures>(4, 3), c).weights();
    const auto oracle_q = oracle::empirical_q_iteration(d, 4, 3, 0.9, 25);
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 3; ++a) CHECK(std::abs(w[s * 3 + a] - oracle_q[s][a]) < 1e-10);
  }
}

TEST_CASE("weights never leave the ball") {
  const LinearMdp m = build_benchmark(BenchmarkSpec{});
  const Dataset d = draw_dataset(m, initial_times_uniform_action(m), 300, 8);
  for (const double B : {0.1, 1.0, 3.0, 10.0}) {
    FqiConfig c;
    c.ball_radius = B;
    c.solver = OlsSolver::MinimumNorm;
    for (const VecX& w : fqi_iterates(d, *bench_features(), c)) CHECK(w.norm() <= B + 1e-9);
  }
}

TEST_CASE("non-finite targets name the offending sample") {
  const int n = 8;
  MatX states(n, 1);
  for (int i = 0; i < n; ++i) states(i, 0) = i % 2;
  VecX rewards = VecX::Ones(n);
  rewards[5] = std::numeric_limits<double>::infinity();
  Eigen::VectorXi actions(n);
  for (int i = 0; i < n; ++i) actions[i] = (i / 2) % 2;
  const Dataset d(states, actions, rewards, states, 0, "bad");
  try {
    fqi_fit(d, std::make_shared<OneHotFeatures>(2, 2), FqiConfig{});
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("sample 5") != std::string::npos);
  }
}

TEST_CASE("error decomposition bound holds along the FQI path") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const TabularMdp m = random_tabular(seed, 5, 2, 1.0, 1.0, 0.8);
    const Dataset d = draw_dataset(m, uniform_tabular_behavior(5, 2), 200, seed);
    FqiConfig c;
    c.iterations = 15;
    c.gamma = 0.8;
    const auto it = fqi_iterates(d, OneHotFeatures(5, 2), c);
    const auto table = [](const VecX& w) { return MatX(Eigen::Map<const MatX>(w.data(), 2, 5).transpose()); };
    const MatX qstar = value_iteration(m, 1e-13);
    const int K = c.iterations;
    double rhs = std::pow(0.8, K) * 1.0 / 0.2;
    for (int t = 0; t < K; ++t) {
      const MatX fk = table(it[K - t]);
      const MatX prev = table(it[K - t - 1]);
      rhs += std::pow(0.8, t) * (fk - bellman_backup(m, prev)).cwiseAbs().maxCoeff();
    }
    CHECK((qstar - table(it[K])).cwiseAbs().maxCoeff() <= rhs + 1e-12);
  }
}

TEST_CASE("minimum iteration count") {
  CHECK(min_iterations(100, 0.1, 6, 0.9) == 1);
  const double n = std::pow(72.0 * 2 / 0.5, 2) * std::exp(2.0);
  CHECK(min_iterations(n, 0.5, 2, std::exp(-1.0)) == 1);
  CHECK(min_iterations(n, 0.5, 2, std::exp(-0.1)) == 10);
  // λ₀²n = 10⁴ is below (72·6)², so the floor applies.
  CHECK(min_iterations(1e6, 0.1, 6, 0.9) == 1);
  CHECK(min_iterations(1e12, 0.1, 6, 0.9) == 52);
}

TEST_CASE("greedy action tie-breaking") {
  CHECK(argmax_lowest((VecX(3) << 1, 1, 1).finished()) == 0);
  CHECK(argmax_lowest((VecX(2) << 1, 2).finished()) == 1);
  CHECK(argmax_lowest((VecX(4) << 0, 5, 1, 5).finished()) == 1);
  MatX q(1, 4);
  q << 0, 5, 1, 5;
  CHECK(GreedyPolicy(q)(TabularMdp::state_vec(0)) == 1);
  CHECK(std::string(GreedyPolicy::tie_break()) == "lowest-index");
}

TEST_CASE("greedy policy is invariant to positive affine maps") {
  Rng rng(12);
  const VecX w = (VecX(6) << 1.0, 1.3, 0.2, 0.9, 0.4, -0.3).finished();
  // φ sums to one, so adding b to every weight adds b to every action value.
  const VecX moved = 2.5 * w + VecX::Constant(6, -7.0);
  const GreedyPolicy p(LinearQFunction(bench_features(), w, 1e6));
  const GreedyPolicy q(LinearQFunction(bench_features(), moved, 1e6));
  for (int i = 0; i < 1000; ++i) {
    const VecX s = (VecX(2) << rng.uniform(), rng.uniform()).finished();
    CHECK(p(s) == q(s));
  }
  const MatX table = MatX::Random(6, 3);
  CHECK(greedy_policy(table) == greedy_policy(MatX((3.0 * table.array() + 4.0).matrix())));
}

TEST_CASE("fitted weights export") {
  const LinearQFunction q(bench_features(), VecX::Constant(6, 0.5), 10.0);
  const nlohmann::json doc = weights_to_json(q, 50);
  CHECK(doc["d"] == 6);
  CHECK(doc["B"] == 10.0);
  CHECK(doc["K"] == 50);
  CHECK(doc["weights"].size() == 6);
}
