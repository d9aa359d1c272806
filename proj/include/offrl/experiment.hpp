#pragma once

#include "offrl/benchmark.hpp"
#include "offrl/bounds.hpp"
#include "offrl/fqi.hpp"
#include "offrl/margin.hpp"
#include "offrl/msbo.hpp"
#include "offrl/policy_eval.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace offrl {

/// Malformed or unknown configuration; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// More than the tolerated share of replications failed; exit code 3.
class SweepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` lines; `#` starts a comment. Duplicate keys are errors.
std::map<std::string, std::string> parse_key_values(const std::string& text);

enum class Estimator { Fqi, Msbo };

struct SweepConfig {
  std::vector<Eigen::Index> n_grid{64, 90, 128, 256, 512};
  int replications = 70;
  Estimator estimator = Estimator::Fqi;
  /// "benchmark" or "tabular".
  std::string mdp = "benchmark";

  std::uint64_t benchmark_seed = 0;
  double gamma = 0.9;

  int tabular_states = 5;
  int tabular_actions = 2;
  std::uint64_t tabular_seed = 0;
  double tabular_reward_bound = 1.0;
  double tabular_concentration = 1.0;
  /// Scan seeds upward from `tabular_seed` until the instance's δ₀ reaches
  /// this value (0 accepts the first instance).
  double tabular_min_delta0 = 0.0;

  int fqi_iterations = 50;
  double fqi_ball_radius = 1e6;
  /// "exact", "min_norm", or "auto" (min_norm on the benchmark, whose
  /// features are rank deficient; exact on tabular instances).
  std::string fqi_solver = "auto";

  double msbo_zeta = 0.5;
  double msbo_weight_bound = 1e6;
  double msbo_witness_bound = 1e6;
  int msbo_outer_steps = 200;
  int msbo_restarts = 1;

  int eval_initial_states = 40000;
  int eval_horizon = 50;
  Eigen::Index reference_n = 40000;
  int reference_iterations = 100;

  std::uint64_t master_seed = 0;
  int parallelism = 1;
  double ci_level = 0.75;
  /// "means" fits the per-n mean regret, "points" every replication.
  std::string fit_mode = "means";
  /// Replaces nonpositive statistics before the log fit when > 0; otherwise
  /// such points are dropped.
  double regret_floor = 0.0;
  /// Wall-clock column; off by default so reruns are byte-identical.
  bool record_wall_time = false;
};

SweepConfig parse_sweep_config(const std::string& text);

/// Resolves "auto" in `fqi_solver` for the configured MDP.
OlsSolver resolved_fqi_solver(const SweepConfig& config);

struct SweepRow {
  Eigen::Index n = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  int k_or_steps = 0;
  RegretEstimate regret;
  double wall_time_ms = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double slope_std_error = 0.0;
  int points_used = 0;
  int points_dropped = 0;
};

/// OLS of log(stat) on log(n) with a two-sided t interval at `ci_level`.
/// Nonpositive statistics are dropped; fewer than three remaining points is
/// an InvalidArgument.
SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points, double ci_level = 0.75);

struct CurvePoint {
  Eigen::Index n = 0;
  int replications = 0;
  double mean = 0.0;
  double median = 0.0;
  double std_error = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct RegretCurve {
  std::vector<CurvePoint> points;
  /// Set unless the fit was skipped.
  std::optional<SlopeFit> fit;
  bool degenerate = false;
};

RegretCurve summarize_curve(const std::vector<SweepRow>& rows, const SweepConfig& config);

struct SweepResult {
  std::vector<SweepRow> rows;
  RegretCurve curve;
  int failures = 0;
};

/// Replication sweep over the n-grid; deterministic given the config.
SweepResult run_sweep(const SweepConfig& config, std::ostream* log = nullptr);

inline constexpr const char* kSweepCsvHeader =
    "n,replication,seed,estimator,K_or_steps,regret,v_star_hat,v_pi_hat,std_error,wall_time_ms";

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Seed of replication `rep` at sample size `n`.
inline std::uint64_t replication_seed(std::uint64_t master, Eigen::Index n, int rep) {
  return derive_seed(master, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep));
}

/// First instance from `seed` upward whose tabular δ₀ is at least
/// `min_delta0` (within `max_tries` seeds); the seed used is written back.
TabularMdp find_tabular_instance(std::uint64_t& seed, int num_states, int num_actions,
                                 double reward_bound, double concentration, double gamma,
                                 double min_delta0, int max_tries = 10000);

struct RegimeRow {
  Eigen::Index n = 0;
  int replications = 0;
  int exact_optimal = 0;
  double fraction = 0.0;
};

struct RegimeReport {
  std::uint64_t instance_seed = 0;
  double delta0 = 0.0;
  std::vector<RegimeRow> rows;
};

/// For each n, the share of replications whose FQI greedy policy matches the
/// has two or more actions and no positive margin.
/// has no positive margin.
RegimeReport tabular_regime_report(const SweepConfig& config);

struct MarginConfig {
  std::string mdp = "benchmark";
  std::uint64_t benchmark_seed = 0;
  double gamma = 0.9;
  int tabular_states = 5;
  int tabular_actions = 2;
  std::uint64_t tabular_seed = 0;
  double tabular_reward_bound = 1.0;
  double tabular_concentration = 1.0;
  int samples_per_policy = 20000;
  int random_policies = 8;
  double grid_lo = 1e-3;
  double grid_hi = 1.0;
  int grid_points = 30;
  Eigen::Index q_star_samples = 1 << 18;
  std::uint64_t seed = 0;
};

MarginConfig parse_margin_config(const std::string& text);

MarginProfile run_margin_profile(const MarginConfig& config);

/// Probe set: the greedy policy of `weights`, `k` greedy policies of
/// perturbed weights, and `k` greedy policies of random weights.
std::vector<Policy> probe_policies(FeatureMapPtr features, const VecX& weights, int k,
                                   std::uint64_t seed);

struct BoundRow {
  std::string quantity;
  /// Sample size for n-dependent quantities, 0 otherwise.
  double n = 0.0;
  /// Empty when the bound does not apply (regime or precondition).
  std::optional<double> value;
  std::string note;
};

/// Evaluates every bound the constants file supports. Keys are the
/// RateConstants fields plus `n` (list), `S`, `A` and `c_universal`; `alpha`
/// accepts `inf`.
std::vector<BoundRow> evaluate_bounds(const std::string& constants_text);

void write_bounds_csv(const std::vector<BoundRow>& rows, std::ostream& out);

}  // namespace offrl
