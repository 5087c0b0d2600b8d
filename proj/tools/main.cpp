// Command line front end: solve, sweep, simulate, verify.
//
// Exit codes: 0 success, 1 verification failure, 2 config or usage error,
// 3 numerical failure.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "retsolve/io.hpp"

namespace fs = std::filesystem;
using namespace retsolve;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  bool tie_delta = false;
};

ModelParams validated_params(SolverConfig& cfg, const CommonArgs& args) {
  if (args.tie_delta) cfg.params.tie_delta_to_k = true;
  return ModelParams::validate(cfg.params);
}

void report_threshold(const SolvedModel& m) {
  std::printf("regime: %s\n", to_string(m.boundary.regime));
  if (m.boundary.j) {
    std::printf("j: %s\n", format_sig(*m.boundary.j).c_str());
  }
  if (m.boundary.z_bar) {
    std::printf("z_bar: %s\n", format_sig(*m.boundary.z_bar).c_str());
    std::printf("w_bar: %s\n", format_sig(*m.boundary.w_bar).c_str());
  }
}

int cmd_solve(const CommonArgs& args, int grid_n) {
  SolverConfig cfg = load_config(args.config_path);
  const ModelParams params = validated_params(cfg, args);
  const SolvedModel m = solve_model(params);

  GridSpec grid = cfg.grid;
  if (grid_n > 0) grid.n = grid_n;
  const auto rows = policy_table(m, grid);

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  write_file((out / "manifest.json").string(),
             manifest_json(m, cfg, utc_timestamp()));
  write_file((out / "policy.csv").string(), policy_csv(rows));

  report_threshold(m);
  std::printf("wrote %s and %s\n", (out / "manifest.json").c_str(),
              (out / "policy.csv").c_str());
  return 0;
}

void apply_sweep_value(RawParams& params, const std::string& name, double v) {
  if (name == "r") params.r = v;
  else if (name == "mu") params.mu = v;
  else if (name == "sigma") params.sigma = v;
  else if (name == "rho") params.rho = v;
  else if (name == "gamma") params.gamma = v;
  else if (name == "delta") params.delta = v;
  else if (name == "y1") params.y1 = v;
  else if (name == "y2") params.y2 = v;
  else if (name == "L") {
    params.support_l = v;
    params.support_i.reset();
  } else if (name == "I") {
    params.support_i = v;
    params.support_l.reset();
  } else {
    throw ValidationError(ValidationError::Code::BadValue, "sweep.param",
                          "unknown sweep parameter " + name);
  }
}

std::vector<double> sweep_values(const SweepSpec& axis) {
  if (!(axis.step > 0) || !std::isfinite(axis.step)) {
    throw ValidationError(ValidationError::Code::BadValue, "sweep.step",
                          "sweep.step must be positive");
  }
  if (axis.to < axis.from) {
    throw ValidationError(ValidationError::Code::BadValue, "sweep.to",
                          "sweep.to must not be below sweep.from");
  }
  const long count =
      static_cast<long>(std::floor((axis.to - axis.from) / axis.step + 1e-9)) +
      1;
  std::vector<double> values;
  values.reserve(static_cast<size_t>(count));
  for (long i = 0; i < count; ++i) {
    values.push_back(axis.from + static_cast<double>(i) * axis.step);
  }
  return values;
}

int cmd_sweep(const CommonArgs& args) {
  SolverConfig cfg = load_config(args.config_path);
  if (cfg.sweep.empty()) {
    throw ValidationError(ValidationError::Code::BadValue, "sweep",
                          "the sweep command needs a sweep section");
  }
  if (args.tie_delta) cfg.params.tie_delta_to_k = true;

  std::vector<std::string> names;
  std::vector<std::vector<double>> axes;
  for (const auto& axis : cfg.sweep) {
    names.push_back(axis.param);
    axes.push_back(sweep_values(axis));
  }

  std::vector<SweepRow> rows;
  const auto solve_point = [&](const std::vector<double>& values) {
    SweepRow row;
    row.values = values;
    RawParams raw = cfg.params;
    try {
      for (size_t k = 0; k < values.size(); ++k) {
        apply_sweep_value(raw, names[k], values[k]);
      }
      const ModelParams p = ModelParams::validate(raw);
      const SolvedModel m = solve_model(p);
      row.regime = to_string(m.boundary.regime);
      row.j = m.boundary.j;
      row.z_bar = m.boundary.z_bar;
      row.w_bar = m.boundary.w_bar;
    } catch (const ValidationError& e) {
      row.error = to_string(e.code());
    } catch (const NumericError& e) {
      row.error = to_string(e.code());
    }
    rows.push_back(std::move(row));
  };

  if (axes.size() == 1) {
    for (double v : axes[0]) solve_point({v});
  } else {
    for (double a : axes[0]) {
      for (double b : axes[1]) solve_point({a, b});
    }
  }

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  write_file((out / "sweep.csv").string(), sweep_csv(names, rows));
  std::printf("wrote %zu rows to %s\n", rows.size(),
              (out / "sweep.csv").c_str());
  return 0;
}

int cmd_simulate(const CommonArgs& args, bool seed_given,
                 std::uint64_t seed) {
  SolverConfig cfg = load_config(args.config_path);
  const ModelParams params = validated_params(cfg, args);
  const SolvedModel m = solve_model(params);
  if (!cfg.has_sim) {
    throw ValidationError(ValidationError::Code::BadValue, "sim",
                          "the simulate command needs a sim section");
  }
  if (seed_given) cfg.sim.master_seed = seed;
  validate_sim_config(cfg.sim);

  const auto paths = simulate_paths(m, cfg.sim);
  const BudgetReport budget = budget_check(m, cfg.sim);

  std::vector<double> times;
  for (double t : {1.0, 5.0, 25.0}) {
    if (t <= cfg.sim.horizon_years) times.push_back(t);
  }
  if (times.empty()) times.push_back(cfg.sim.horizon_years);
  const auto mart =
      martingale_check(m, resolve_initial_dual(m, cfg.sim),
                       cfg.sim.master_seed + 1, cfg.sim.n_paths, times);

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  write_file((out / "paths.csv").string(), paths_csv(paths));
  write_file((out / "summary.json").string(),
             summary_json(budget, mart, cfg.sim.master_seed));

  std::printf("budget %s: estimate %s vs target %s (3se+tail %s)\n",
              budget.pass ? "ok" : "off", format_sig(budget.estimate).c_str(),
              format_sig(budget.target).c_str(),
              format_sig(3.0 * budget.std_error + budget.tail_bound).c_str());
  std::printf("wrote %s and %s\n", (out / "paths.csv").c_str(),
              (out / "summary.json").c_str());
  return 0;
}

int cmd_verify(const CommonArgs& args, bool seed_given, std::uint64_t seed,
               long mc_paths) {
  SolverConfig cfg = load_config(args.config_path);
  const ModelParams params = validated_params(cfg, args);
  const SolvedModel m = solve_model(params);

  VerifyOptions opt;
  if (seed_given) opt.seed = seed;
  if (mc_paths > 0) opt.mc_paths = mc_paths;
  const auto checks = run_verification(m, opt);

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  write_file((out / "verify.json").string(), verify_json(checks));

  for (const auto& chk : checks) {
    std::printf("[%s] %s (error %s, tolerance %s)%s%s\n", chk.status.c_str(),
                chk.name.c_str(), format_sig(chk.error).c_str(),
                format_sig(chk.tolerance).c_str(),
                chk.detail.empty() ? "" : ": ", chk.detail.c_str());
  }
  const bool ok = all_passed(checks);
  std::printf("%s\n", ok ? "all checks passed" : "verification FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threshold solver for voluntary retirement with income support"};
  app.require_subcommand(1);

  CommonArgs args;
  int grid_n = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  long mc_paths = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "config JSON path")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_flag("--tie-delta-to-k", args.tie_delta,
                  "force delta equal to the Merton constant");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve and write the policy");
  add_common(solve);
  solve->add_option("--grid", grid_n, "policy grid size override");

  CLI::App* sweep = app.add_subcommand("sweep", "solve over a parameter grid");
  add_common(sweep);

  CLI::App* simulate =
      app.add_subcommand("simulate", "simulate paths and budget identity");
  add_common(simulate);
  simulate->add_option("--seed", seed, "master seed override")
      ->each([&](const std::string&) { seed_given = true; });

  CLI::App* verify =
      app.add_subcommand("verify", "run the verification battery");
  add_common(verify);
  verify->add_option("--seed", seed, "Monte Carlo seed")
      ->each([&](const std::string&) { seed_given = true; });
  verify->add_option("--mc-paths", mc_paths, "Monte Carlo path count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(args, grid_n);
    if (sweep->parsed()) return cmd_sweep(args);
    if (simulate->parsed()) return cmd_simulate(args, seed_given, seed);
    return cmd_verify(args, seed_given, seed, mc_paths);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error [%s] %s: %s\n", to_string(e.code()),
                 e.field().c_str(), e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error [%s]: %s\n", to_string(e.code()), e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
