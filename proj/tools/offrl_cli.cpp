// Command-line front end for the experiment drivers.
//
// Exit codes: 0 success, 1 other error, 2 configuration error, 3 sweep
// failure threshold exceeded.

#include "offrl/experiment.hpp"
#include "offrl/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace offrl;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write(out);
}

nlohmann::json curve_json(const RegretCurve& curve) {
  nlohmann::json doc;
  for (const auto& p : curve.points)
    doc["points"].push_back({{"n", p.n},
                             {"replications", p.replications},
                             {"mean", p.mean},
                             {"median", p.median},
                             {"std_error", p.std_error},
                             {"ci_lo", p.ci_lo},
                             {"ci_hi", p.ci_hi}});
  doc["degenerate"] = curve.degenerate;
  if (curve.fit) {
    doc["slope"] = curve.fit->slope;
    doc["slope_ci"] = {curve.fit->ci_lo, curve.fit->ci_hi};
    doc["intercept"] = curve.fit->intercept;
    doc["points_used"] = curve.fit->points_used;
    doc["points_dropped"] = curve.fit->points_dropped;
  }
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Offline RL regret-rate experiments"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "Synthetic benchmark instances");
  bench->alias("benchmark");
  bench->require_subcommand(1);
  auto* bench_build = bench->add_subcommand("build", "Print the benchmark parameters as JSON");
  BenchmarkSpec spec;
  std::string bench_out;
  bool with_qstar = false;
  bench_build->alias("dump-params");
  bench_build->add_option("--seed", spec.seed, "Instance seed");
  bench_build->add_option("--gamma", spec.gamma, "Discount factor");
  bench_build->add_option("--out", bench_out, "Output file (default stdout)");
  bench_build->add_flag("--q-star", with_qstar, "Include the model-based Q* weights");
  auto* bench_select = bench->add_subcommand(
      "select-seed", "First seed whose Q* decision boundary crosses the state square");
  std::uint64_t select_start = 0;
  double select_share = 0.1;
  bench_select->add_option("--start", select_start, "First seed to try");
  bench_select->add_option("--min-share", select_share, "Least share of the square per action");
  bench_select->add_option("--gamma", spec.gamma, "Discount factor");

  auto* sweep = app.add_subcommand("sweep", "Replication sweeps");
  sweep->require_subcommand(1);
  auto* sweep_run = sweep->add_subcommand("run", "Run a sweep and write the raw CSV");
  std::string config_path, csv_out, summary_out;
  sweep_run->add_option("--config", config_path, "Key-value config file")->required();
  sweep_run->add_option("--out", csv_out, "CSV output (default stdout)");
  sweep_run->add_option("--summary", summary_out, "Per-n statistics and slope as JSON");
  auto* sweep_slope = sweep->add_subcommand("slope", "Fit the log-log slope of a sweep CSV");
  std::string csv_in;
  SweepConfig slope_config;
  sweep_slope->add_option("--csv", csv_in, "Sweep CSV")->required();
  sweep_slope->add_option("--ci", slope_config.ci_level, "Confidence level");
  sweep_slope->add_option("--fit-mode", slope_config.fit_mode, "means or points")
      ->check(CLI::IsMember({"means", "points"}));

  auto* bounds = app.add_subcommand("bounds", "Evaluate the regret bounds as a CSV table");
  std::string constants_path;
  bounds->add_option("--constants", constants_path, "Key-value constants file")->required();

  auto* margin = app.add_subcommand("margin", "Margin profiles");
  margin->require_subcommand(1);
  auto* margin_profile = margin->add_subcommand("profile", "Estimate and fit a margin profile");
  std::string margin_config, margin_csv;
  margin_profile->add_option("--config", margin_config, "Key-value config file")->required();
  margin_profile->add_option("--csv", margin_csv, "Also write (delta, cdf_max_over_policies) rows");

  auto* tabular = app.add_subcommand("tabular", "Tabular experiments");
  tabular->require_subcommand(1);
  auto* tabular_regime = tabular->add_subcommand("regime", "Exact-optimality fraction per n");
  std::string regime_config;
  tabular_regime->add_option("--config", regime_config, "Key-value config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench_build->parsed()) {
      const BenchmarkParams params = draw_benchmark_params(spec);
      nlohmann::json doc = to_json(params, spec);
      if (with_qstar) {
        const VecX w = benchmark_q_star_weights(params, spec.gamma);
        doc["q_star_weights"] = std::vector<double>(w.data(), w.data() + w.size());
        doc["action_one_share"] = action_one_share(w);
      }
      emit(bench_out, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
    } else if (bench_select->parsed()) {
      std::cout << select_benchmark_seed(select_start, spec.gamma, select_share) << '\n';
    } else if (sweep_run->parsed()) {
      const SweepConfig config = parse_sweep_config(read_file(config_path));
      const SweepResult result = run_sweep(config, &std::cerr);
      emit(csv_out, [&](std::ostream& out) { write_sweep_csv(result.rows, out); });
      const std::string summary = curve_json(result.curve).dump(2);
      if (summary_out.empty())
        std::cerr << summary << '\n';
      else
        emit(summary_out, [&](std::ostream& out) { out << summary << '\n'; });
    } else if (sweep_slope->parsed()) {
      std::ifstream in(csv_in);
      if (!in) throw ConfigError("cannot open '" + csv_in + "'");
      const auto rows = read_sweep_csv(in);
      slope_config.n_grid.clear();
      for (const auto& r : rows)
        if (std::find(slope_config.n_grid.begin(), slope_config.n_grid.end(), r.n) ==
            slope_config.n_grid.end())
          slope_config.n_grid.push_back(r.n);
      std::sort(slope_config.n_grid.begin(), slope_config.n_grid.end());
      const RegretCurve curve = summarize_curve(rows, slope_config);
      for (const auto& p : curve.points)
        if (!(p.mean > 0.0)) std::cerr << "warning: n=" << p.n << " has nonpositive mean regret\n";
      std::cout << curve_json(curve).dump(2) << '\n';
    } else if (bounds->parsed()) {
      write_bounds_csv(evaluate_bounds(read_file(constants_path)), std::cout);
    } else if (margin_profile->parsed()) {
      const MarginProfile p = run_margin_profile(parse_margin_config(read_file(margin_config)));
      if (!margin_csv.empty())
        emit(margin_csv, [&](std::ostream& out) {
          out << "delta,cdf_max_over_policies\n";
          for (std::size_t i = 0; i < p.delta_grid.size(); ++i)
            out << format_double(p.delta_grid[i]) << ',' << format_double(p.cdf_values[i]) << '\n';
        });
      std::cout << profile_summary_json(p).dump(2) << '\n';
    } else if (tabular_regime->parsed()) {
      const RegimeReport r = tabular_regime_report(parse_sweep_config(read_file(regime_config)));
      nlohmann::json doc;
      doc["instance_seed"] = r.instance_seed;
      doc["delta0"] = r.delta0;
      for (const auto& row : r.rows)
        doc["rows"].push_back({{"n", row.n},
                               {"replications", row.replications},
                               {"exact_optimal", row.exact_optimal},
                               {"fraction", row.fraction}});
      std::cout << doc.dump(2) << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SweepFailure& e) {
    std::cerr << "sweep failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
