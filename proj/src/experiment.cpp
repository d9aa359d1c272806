#include "offrl/experiment.hpp"

#include "offrl/io.hpp"
#include "offrl/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace offrl {

namespace {

// Substream tags for quantities drawn once per sweep.
constexpr std::uint64_t kReferenceTag = 0x52454600ULL;
constexpr std::uint64_t kEvalTag = 0x4556414CULL;

// Binds config keys to fields; whatever is left over is an unknown key.
class KeyBinder {
 public:
  explicit KeyBinder(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  template <typename T>
  void bind(const std::string& key, T& field) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return;
    try {
      assign(it->second, field);
    } catch (const std::exception& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
    kv_.erase(it);
  }

  void finish() const {
    if (!kv_.empty()) throw ConfigError("unknown config key '" + kv_.begin()->first + "'");
  }

 private:
  static void assign(const std::string& v, double& f) { f = parse_double(v); }
  static void assign(const std::string& v, int& f) { f = static_cast<int>(parse_integer(v)); }
  static void assign(const std::string& v, long& f) { f = static_cast<long>(parse_integer(v)); }
  static void assign(const std::string& v, long long& f) { f = parse_integer(v); }
  static void assign(const std::string& v, std::uint64_t& f) {
    const auto res = std::from_chars(v.data(), v.data() + v.size(), f);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
      throw std::invalid_argument("not an unsigned integer: '" + v + "'");
  }
  static void assign(const std::string& v, std::string& f) { f = v; }
  static void assign(const std::string& v, bool& f) {
    if (v == "true" || v == "1") f = true;
    else if (v == "false" || v == "0") f = false;
    else throw std::invalid_argument("expected true/false, got '" + v + "'");
  }
  static void assign(const std::string& v, std::vector<Eigen::Index>& f) {
    f.clear();
    std::string cleaned = v;
    for (char& c : cleaned)
      if (c == '[' || c == ']') c = ' ';
    for (const auto part : split(cleaned, ',')) {
      const auto t = trim(part);
      if (!t.empty()) f.push_back(static_cast<Eigen::Index>(parse_integer(t)));
    }
  }
  static void assign(const std::string& v, Estimator& f) {
    if (v == "fqi") f = Estimator::Fqi;
    else if (v == "msbo") f = Estimator::Msbo;
    else throw std::invalid_argument("estimator must be fqi or msbo");
  }

  std::map<std::string, std::string> kv_;
};

const char* estimator_name(Estimator e) { return e == Estimator::Fqi ? "fqi" : "msbo"; }

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size();
  return m % 2 ? xs[m / 2] : 0.5 * (xs[m / 2 - 1] + xs[m / 2]);
}

void validate(const SweepConfig& c) {
  if (c.n_grid.empty()) throw ConfigError("n_grid must be nonempty");
  for (std::size_t i = 0; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] < 1) throw ConfigError("n_grid entries must be positive");
    if (i > 0 && c.n_grid[i] <= c.n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  }
  if (c.replications < 2) throw ConfigError("replications must be at least 2");
  if (c.mdp != "benchmark" && c.mdp != "tabular") throw ConfigError("mdp must be benchmark or tabular");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (c.fit_mode != "means" && c.fit_mode != "points") throw ConfigError("fit_mode must be means or points");
  if (!(c.ci_level > 0.0 && c.ci_level < 1.0)) throw ConfigError("ci_level must lie in (0, 1)");
  if (c.parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (c.fqi_solver != "auto" && c.fqi_solver != "exact" && c.fqi_solver != "min_norm")
    throw ConfigError("fqi_solver must be auto, exact or min_norm");
  if (c.fqi_iterations < 1) throw ConfigError("fqi_iterations must be at least 1");
  if (c.eval_initial_states < 1 || c.eval_horizon < 1) throw ConfigError("evaluation sizes must be positive");
}

// What a replication needs to turn a dataset into a regret row.
struct SweepContext {
  const SweepConfig& config;
  const MdpModel* model = nullptr;
  FeatureMapPtr features;
  BehaviorSampler behavior;
  // Benchmark path.
  std::vector<double> reference_returns;
  EvalConfig eval;
  // Tabular path.
  const TabularMdp* tabular = nullptr;
  TabularPolicy optimal;
};

SweepRow run_replication(const SweepContext& ctx, Eigen::Index n, int rep) {
  const SweepConfig& c = ctx.config;
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.n = n;
  row.replication = rep;
  row.seed = replication_seed(c.master_seed, n, rep);
  row.estimator = estimator_name(c.estimator);

  const Dataset data = draw_dataset(*ctx.model, ctx.behavior, n, row.seed);
  std::optional<GreedyPolicy> policy;
  if (c.estimator == Estimator::Fqi) {
    FqiConfig fc;
    fc.iterations = c.fqi_iterations;
    fc.ball_radius = c.fqi_ball_radius;
    fc.gamma = ctx.model->discount();
    fc.solver = resolved_fqi_solver(c);
    policy.emplace(fqi_fit(data, ctx.features, fc));
    row.k_or_steps = c.fqi_iterations;
  } else {
    MsboConfig mc;
    mc.zeta = c.msbo_zeta;
    mc.weight_bound = c.msbo_weight_bound;
    mc.witness_bound = c.msbo_witness_bound;
    mc.outer_steps = c.msbo_outer_steps;
    mc.restarts = c.msbo_restarts;
    mc.gamma = ctx.model->discount();
    mc.seed = row.seed;
    const MsboSolution sol = msbo_fit(data, *ctx.features, mc);
    policy.emplace(LinearQFunction(ctx.features, sol.q_weights, c.msbo_weight_bound));
    row.k_or_steps = sol.iterations_used;
  }

  if (ctx.tabular) {
    const TabularPolicy pi = tabulate_policy(*policy, ctx.tabular->num_states());
    row.regret = estimate_regret(*ctx.tabular, pi, ctx.optimal);
  } else {
    row.regret = estimate_regret(*ctx.model, *policy, ctx.reference_returns, ctx.eval);
  }
  if (c.record_wall_time)
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) throw ConfigError("duplicate config key '" + key + "'");
  }
  return out;
}

SweepConfig parse_sweep_config(const std::string& text) {
  SweepConfig c;
  KeyBinder b(parse_key_values(text));
  b.bind("n_grid", c.n_grid);
  b.bind("replications", c.replications);
  b.bind("estimator", c.estimator);
  b.bind("mdp", c.mdp);
  b.bind("benchmark_seed", c.benchmark_seed);
  b.bind("gamma", c.gamma);
  b.bind("tabular_states", c.tabular_states);
  b.bind("tabular_actions", c.tabular_actions);
  b.bind("tabular_seed", c.tabular_seed);
  b.bind("tabular_reward_bound", c.tabular_reward_bound);
  b.bind("tabular_concentration", c.tabular_concentration);
  b.bind("tabular_min_delta0", c.tabular_min_delta0);
  b.bind("fqi_iterations", c.fqi_iterations);
  b.bind("fqi_ball_radius", c.fqi_ball_radius);
  b.bind("fqi_solver", c.fqi_solver);
  b.bind("msbo_zeta", c.msbo_zeta);
  b.bind("msbo_weight_bound", c.msbo_weight_bound);
  b.bind("msbo_witness_bound", c.msbo_witness_bound);
  b.bind("msbo_outer_steps", c.msbo_outer_steps);
  b.bind("msbo_restarts", c.msbo_restarts);
  b.bind("eval_initial_states", c.eval_initial_states);
  b.bind("eval_horizon", c.eval_horizon);
  b.bind("reference_n", c.reference_n);
  b.bind("reference_iterations", c.reference_iterations);
  b.bind("master_seed", c.master_seed);
  b.bind("parallelism", c.parallelism);
  b.bind("ci_level", c.ci_level);
  b.bind("fit_mode", c.fit_mode);
  b.bind("regret_floor", c.regret_floor);
  b.bind("record_wall_time", c.record_wall_time);
  b.finish();
  validate(c);
  return c;
}

OlsSolver resolved_fqi_solver(const SweepConfig& config) {
  if (config.fqi_solver == "exact") return OlsSolver::Exact;
  if (config.fqi_solver == "min_norm") return OlsSolver::MinimumNorm;
  return config.mdp == "benchmark" ? OlsSolver::MinimumNorm : OlsSolver::Exact;
}

SlopeFit fit_slope(const std::vector<std::pair<double, double>>& points, double ci_level) {
  std::vector<double> xs, ys;
  SlopeFit fit;
  for (const auto& [n, stat] : points) {
    if (!(stat > 0.0) || !(n > 0.0)) {
      ++fit.points_dropped;
      continue;
    }
    xs.push_back(std::log(n));
    ys.push_back(std::log(stat));
  }
  if (xs.size() < 3) throw InvalidArgument("slope fit needs at least three positive points");
  const Eigen::Index m = static_cast<Eigen::Index>(xs.size());
  const Eigen::Map<const VecX> x(xs.data(), m), y(ys.data(), m);
  const double xbar = x.mean(), ybar = y.mean();
  const ArrX dx = x.array() - xbar;
  const double sxx = dx.square().sum();
  if (!(sxx > 0.0)) throw InvalidArgument("slope fit needs at least two distinct n");
  fit.slope = (dx * (y.array() - ybar)).sum() / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  const ArrX resid = y.array() - (fit.intercept + fit.slope * x.array());
  const double dof = static_cast<double>(m - 2);
  fit.slope_std_error = std::sqrt(resid.square().sum() / dof / sxx);
  const double half = student_t_critical(ci_level, dof) * fit.slope_std_error;
  fit.ci_lo = fit.slope - half;
  fit.ci_hi = fit.slope + half;
  fit.points_used = static_cast<int>(m);
  return fit;
}

RegretCurve summarize_curve(const std::vector<SweepRow>& rows, const SweepConfig& config) {
  RegretCurve curve;
  std::vector<std::pair<double, double>> fit_points;
  for (const Eigen::Index n : config.n_grid) {
    std::vector<double> vals;
    for (const auto& r : rows)
      if (r.n == n) vals.push_back(r.regret.regret);
    if (vals.empty()) continue;
    CurvePoint p;
    p.n = n;
    p.replications = static_cast<int>(vals.size());
    p.mean = stable_sum(vals) / static_cast<double>(vals.size());
    p.median = median_of(vals);
    if (vals.size() >= 2) {
      std::vector<double> sq;
      for (const double v : vals) sq.push_back((v - p.mean) * (v - p.mean));
      p.std_error = std::sqrt(stable_sum(sq) / static_cast<double>(vals.size() - 1) /
                              static_cast<double>(vals.size()));
      const double half =
          student_t_critical(config.ci_level, static_cast<double>(vals.size() - 1)) * p.std_error;
      p.ci_lo = p.mean - half;
      p.ci_hi = p.mean + half;
    } else {
      p.ci_lo = p.ci_hi = p.mean;
    }
    curve.points.push_back(p);
    const auto floored = [&](double v) { return config.regret_floor > 0.0 && v <= 0.0 ? config.regret_floor : v; };
    if (config.fit_mode == "means") {
      fit_points.emplace_back(static_cast<double>(n), floored(p.mean));
    } else {
      for (const double v : vals) fit_points.emplace_back(static_cast<double>(n), floored(v));
    }
  }
  try {
    curve.fit = fit_slope(fit_points, config.ci_level);
  } catch (const InvalidArgument&) {
    curve.degenerate = true;
  }
  return curve;
}

TabularMdp find_tabular_instance(std::uint64_t& seed, int num_states, int num_actions,
                                 double reward_bound, double concentration, double gamma,
                                 double min_delta0, int max_tries) {
  for (int t = 0; t < max_tries; ++t, ++seed) {
    TabularMdp mdp = random_tabular(seed, num_states, num_actions, reward_bound, concentration, gamma);
    if (min_delta0 <= 0.0) return mdp;
    const auto d0 = tabular_delta0(value_iteration(mdp, 1e-12));
    if (d0 && *d0 >= min_delta0) return mdp;
  }
  throw ConfigError("no tabular instance with the requested δ₀ within the seed budget");
}

SweepResult run_sweep(const SweepConfig& config, std::ostream* log) {
  validate(config);
  SweepContext ctx{config, nullptr, {}, {}, {}, {}, nullptr, {}};
  std::optional<LinearMdp> bench;
  std::optional<TabularMdp> tab;

  if (config.mdp == "benchmark") {
    BenchmarkSpec spec;
    spec.seed = config.benchmark_seed;
    spec.gamma = config.gamma;
    bench.emplace(build_benchmark(spec));
    ctx.model = &*bench;
    ctx.features = bench->features();
    ctx.behavior = initial_times_uniform_action(*bench);
    ReferenceConfig rc;
    rc.n = config.reference_n;
    rc.iterations = config.reference_iterations;
    rc.seed = derive_seed(config.master_seed, kReferenceTag);
    rc.solver = resolved_fqi_solver(config);
    const GreedyPolicy reference = reference_optimal(*bench, ctx.features, ctx.behavior, rc);
    ctx.eval = {config.eval_initial_states, config.eval_horizon, derive_seed(config.master_seed, kEvalTag)};
    ctx.reference_returns = rollout_returns(*bench, reference, ctx.eval);
  } else {
    std::uint64_t seed = config.tabular_seed;
    tab.emplace(find_tabular_instance(seed, config.tabular_states, config.tabular_actions,
                                      config.tabular_reward_bound, config.tabular_concentration,
                                      config.gamma, config.tabular_min_delta0));
    ctx.model = &*tab;
    ctx.tabular = &*tab;
    ctx.features = std::make_shared<OneHotFeatures>(config.tabular_states, config.tabular_actions);
    ctx.behavior = uniform_tabular_behavior(config.tabular_states, config.tabular_actions);
    ctx.optimal = greedy_policy(value_iteration(*tab, 1e-12));
  }

  struct Task {
    Eigen::Index n;
    int rep;
  };
  std::vector<Task> tasks;
  std::set<std::uint64_t> seeds;
  for (const Eigen::Index n : config.n_grid)
    for (int r = 0; r < config.replications; ++r) {
      tasks.push_back({n, r});
      if (!seeds.insert(replication_seed(config.master_seed, n, r)).second)
        throw SweepFailure("replication seed collision at n=" + std::to_string(n));
    }

  std::vector<std::optional<SweepRow>> results(tasks.size());
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), config.parallelism, [&](std::size_t i) {
    try {
      results[i] = run_replication(ctx, tasks[i].n, tasks[i].rep);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  SweepResult out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (results[i]) {
      out.rows.push_back(*results[i]);
    } else {
      ++out.failures;
      if (log)
        *log << "replication n=" << tasks[i].n << " rep=" << tasks[i].rep
             << " seed=" << replication_seed(config.master_seed, tasks[i].n, tasks[i].rep)
             << " failed: " << errors[i] << '\n';
    }
  }
  if (out.failures * 10 > static_cast<int>(tasks.size()))
    throw SweepFailure(std::to_string(out.failures) + " of " + std::to_string(tasks.size()) +
                       " replications failed");
  out.curve = summarize_curve(out.rows, config);
  if (log && out.curve.degenerate) *log << "slope fit skipped: fewer than three positive points\n";
  return out;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.n << ',' << r.replication << ',' << r.seed << ',' << r.estimator << ',' << r.k_or_steps
        << ',' << format_double(r.regret.regret) << ',' << format_double(r.regret.v_star_hat) << ','
        << format_double(r.regret.v_pi_hat) << ',' << format_double(r.regret.std_error) << ','
        << format_double(r.wall_time_ms) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kSweepCsvHeader)
    throw DataError("sweep CSV must start with the header: " + std::string(kSweepCsvHeader));
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto f = split(t, ',');
    if (f.size() != 10) throw DataError("sweep CSV row with " + std::to_string(f.size()) + " fields");
    SweepRow r;
    r.n = static_cast<Eigen::Index>(parse_integer(f[0]));
    r.replication = static_cast<int>(parse_integer(f[1]));
    std::from_chars(f[2].data(), f[2].data() + f[2].size(), r.seed);
    r.estimator = std::string(f[3]);
    r.k_or_steps = static_cast<int>(parse_integer(f[4]));
    r.regret.regret = parse_double(f[5]);
    r.regret.v_star_hat = parse_double(f[6]);
    r.regret.v_pi_hat = parse_double(f[7]);
    r.regret.std_error = parse_double(f[8]);
    r.wall_time_ms = parse_double(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

RegimeReport tabular_regime_report(const SweepConfig& config) {
  validate(config);
  RegimeReport report;
  std::uint64_t seed = config.tabular_seed;
  const TabularMdp mdp =
      find_tabular_instance(seed, config.tabular_states, config.tabular_actions,
                            config.tabular_reward_bound, config.tabular_concentration,
                            config.gamma, config.tabular_min_delta0);
  report.instance_seed = seed;
  const TabularQFunction qstar = value_iteration(mdp, 1e-12);
  // With a single action there is no decision to get wrong; δ₀ stays 0.
  if (config.tabular_actions > 1) {
    const auto d0 = tabular_delta0(qstar);
    if (!d0) throw RegimeError("tabular instance has no positive margin");
    report.delta0 = *d0;
  }
  const TabularPolicy optimal = greedy_policy(qstar);
  const auto features = std::make_shared<OneHotFeatures>(config.tabular_states, config.tabular_actions);
  const BehaviorSampler behavior = uniform_tabular_behavior(config.tabular_states, config.tabular_actions);

  for (const Eigen::Index n : config.n_grid) {
    std::vector<char> hit(static_cast<std::size_t>(config.replications), 0);
    parallel_for(hit.size(), config.parallelism, [&](std::size_t r) {
      const Dataset data = draw_dataset(mdp, behavior, n, replication_seed(config.master_seed, n, static_cast<int>(r)));
      FqiConfig fc;
      fc.iterations = config.fqi_iterations;
      fc.ball_radius = config.fqi_ball_radius;
      fc.gamma = mdp.discount();
      fc.solver = resolved_fqi_solver(config);
      const GreedyPolicy pi(fqi_fit(data, features, fc));
      hit[r] = tabulate_policy(pi, mdp.num_states()) == optimal;
    });
    RegimeRow row;
    row.n = n;
    row.replications = config.replications;
    row.exact_optimal = static_cast<int>(std::count(hit.begin(), hit.end(), 1));
    row.fraction = static_cast<double>(row.exact_optimal) / config.replications;
    report.rows.push_back(row);
  }
  return report;
}

MarginConfig parse_margin_config(const std::string& text) {
  MarginConfig c;
  KeyBinder b(parse_key_values(text));
  b.bind("mdp", c.mdp);
  b.bind("benchmark_seed", c.benchmark_seed);
  b.bind("gamma", c.gamma);
  b.bind("tabular_states", c.tabular_states);
  b.bind("tabular_actions", c.tabular_actions);
  b.bind("tabular_seed", c.tabular_seed);
  b.bind("tabular_reward_bound", c.tabular_reward_bound);
  b.bind("tabular_concentration", c.tabular_concentration);
  b.bind("samples_per_policy", c.samples_per_policy);
  b.bind("random_policies", c.random_policies);
  b.bind("grid_lo", c.grid_lo);
  b.bind("grid_hi", c.grid_hi);
  b.bind("grid_points", c.grid_points);
  b.bind("q_star_samples", c.q_star_samples);
  b.bind("seed", c.seed);
  b.finish();
  if (c.mdp != "benchmark" && c.mdp != "tabular") throw ConfigError("mdp must be benchmark or tabular");
  if (c.samples_per_policy < 1) throw ConfigError("samples_per_policy must be positive");
  if (!(c.grid_lo > 0.0 && c.grid_hi > c.grid_lo) || c.grid_points < 2)
    throw ConfigError("need 0 < grid_lo < grid_hi and grid_points ≥ 2");
  return c;
}

std::vector<Policy> probe_policies(FeatureMapPtr features, const VecX& weights, int k,
                                   std::uint64_t seed) {
  std::vector<Policy> out;
  out.emplace_back(GreedyPolicy(LinearQFunction(features, weights, 1e300)));
  Rng rng(seed);
  const double scale = 0.1 * std::max(weights.norm(), 1e-12) / std::sqrt(static_cast<double>(weights.size()));
  for (int i = 0; i < k; ++i) {
    VecX w = weights;
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] += scale * normal(rng);
    out.emplace_back(GreedyPolicy(LinearQFunction(features, std::move(w), 1e300)));
  }
  for (int i = 0; i < k; ++i) {
    VecX w(weights.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = normal(rng);
    out.emplace_back(GreedyPolicy(LinearQFunction(features, std::move(w), 1e300)));
  }
  return out;
}

MarginProfile run_margin_profile(const MarginConfig& config) {
  const std::vector<double> grid = log_grid(config.grid_lo, config.grid_hi, config.grid_points);
  if (config.mdp == "benchmark") {
    BenchmarkSpec spec;
    spec.seed = config.benchmark_seed;
    spec.gamma = config.gamma;
    const BenchmarkParams params = draw_benchmark_params(spec);
    const LinearMdp mdp = build_benchmark(params, spec);
    const VecX w = benchmark_q_star_weights(params, config.gamma, config.q_star_samples,
                                            derive_seed(config.seed, 1));
    const LinearQFunction q(mdp.features(), w, 1e300);
    const QOracle oracle = [q](const StateVec& s) { return q.action_values(s); };
    const auto policies = probe_policies(mdp.features(), w, config.random_policies, derive_seed(config.seed, 2));
    return estimate_profile(mdp, oracle, policies, config.samples_per_policy, grid, derive_seed(config.seed, 3));
  }
  std::uint64_t seed = config.tabular_seed;
  const TabularMdp mdp = find_tabular_instance(seed, config.tabular_states, config.tabular_actions,
                                               config.tabular_reward_bound,
                                               config.tabular_concentration, config.gamma, 0.0);
  const TabularQFunction qstar = value_iteration(mdp, 1e-12);
  const QOracle oracle = [qstar](const StateVec& s) -> VecX {
    return qstar.row(TabularMdp::state_index(s)).transpose();
  };
  // Every deterministic policy is a probe when the table is small enough.
  std::vector<Policy> policies;
  const int S = mdp.num_states(), A = mdp.num_actions();
  const double total = std::pow(static_cast<double>(A), S);
  if (total <= 256) {
    for (long code = 0; code < static_cast<long>(total); ++code) {
      TabularPolicy pi(S);
      long c = code;
      for (int s = 0; s < S; ++s, c /= A) pi[s] = static_cast<int>(c % A);
      policies.emplace_back([pi](const StateVec& st) { return pi[TabularMdp::state_index(st)]; });
    }
  } else {
    policies.emplace_back(GreedyPolicy(qstar));
  }
  return estimate_profile(mdp, oracle, policies, config.samples_per_policy, grid, derive_seed(config.seed, 3));
}

std::vector<BoundRow> evaluate_bounds(const std::string& constants_text) {
  RateConstants k;
  std::vector<Eigen::Index> ns;
  double S = 0.0, A = 0.0, c_universal = 1.0;
  KeyBinder b(parse_key_values(constants_text));
  b.bind("alpha", k.alpha);
  b.bind("delta0", k.delta0);
  b.bind("delta1", k.delta1);
  b.bind("C", k.C);
  b.bind("a_n", k.a_n);
  b.bind("gamma", k.gamma);
  b.bind("Q_max", k.Q_max);
  b.bind("M", k.M);
  b.bind("B", k.B);
  b.bind("d", k.d);
  b.bind("lambda0", k.lambda0);
  b.bind("zeta", k.zeta);
  b.bind("M_prime", k.M_prime);
  b.bind("lambda0_prime", k.lambda0_prime);
  b.bind("n", ns);
  b.bind("S", S);
  b.bind("A", A);
  b.bind("c_universal", c_universal);
  b.finish();

  std::vector<BoundRow> rows;
  const auto attempt = [&rows](std::string name, double n, const std::function<double()>& f) {
    BoundRow row{std::move(name), n, std::nullopt, ""};
    try {
      row.value = f();
    } catch (const RegimeError& e) {
      row.note = e.what();
    } catch (const InvalidArgument& e) {
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  };
  if (std::isfinite(k.alpha)) {
    attempt("c_alpha_series", 0.0, [&] { return c_alpha(k.alpha).series_value; });
    attempt("c_alpha_closed_form_upper", 0.0, [&] { return c_alpha(k.alpha).closed_form_upper; });
  }
  if (k.a_n > 0.0) {
    attempt("thm1", 0.0, [&] { return thm1_bound(k); });
    attempt("finite_margin", 0.0, [&] { return finite_margin_bound(k); });
    attempt("infinite_margin", 0.0, [&] { return infinite_margin_bound(k); });
  }
  attempt("fqi_exponential_threshold", 0.0, [&] { return fqi_exponential_threshold(k); });
  for (const Eigen::Index n : ns) {
    const double nn = static_cast<double>(n);
    attempt("fqi_an", nn, [&] { return fqi_an(nn, k.d, k.M, k.B, k.gamma, k.lambda0); });
    attempt("cor7", nn, [&] { return cor7_bounds(k, nn); });
    attempt("msbo_an", nn,
            [&] { return msbo_an(nn, k.d, k.M_prime, k.zeta, k.lambda0_prime, c_universal); });
    if (S > 0.0 && A > 0.0) {
      const auto tb = [&] { return tabular_bounds(S, A, k.M, k.B, k.gamma, k.lambda0, k.delta0, nn); };
      attempt("tabular_baseline", nn, [&] { return tb().baseline_sqrt_bound; });
      attempt("tabular_exponential", nn, [&] {
        const auto r = tb();
        if (!r.exponential_bound) throw RegimeError("n is below the tabular exponential threshold");
        return *r.exponential_bound;
      });
    }
  }
  return rows;
}

void write_bounds_csv(const std::vector<BoundRow>& rows, std::ostream& out) {
  out << "quantity,n,value,note\n";
  for (const auto& r : rows) {
    std::string note = r.note;
    std::replace(note.begin(), note.end(), ',', ';');
    out << r.quantity << ',' << (r.n > 0.0 ? format_double(r.n) : "") << ','
        << (r.value ? format_double(*r.value) : "NA") << ',' << note << '\n';
  }
}

}  // namespace offrl
