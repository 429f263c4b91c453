// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks
//
// Command-line front end. Exit codes: 0 success, 1 usage/configuration error,
// 2 the QoS floors are infeasible within the power budget, 3 the numerical
// solver failed.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "satee/baselines.hpp"
#include "satee/channel.hpp"
#include "satee/config.hpp"
#include "satee/ee_precoder.hpp"
#include "satee/errors.hpp"
#include "satee/experiment.hpp"
#include "satee/metrics.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out;
  int workers = 0;  // 0 keeps the config's value
};

void add_common(CLI::App* sub, CommonOpts& opts) {
  auto* config = sub->add_option("--config", opts.config_path,
                                 "experiment config file (INI sections "
                                 "[geometry] [layout] [params] [sweep] [run])")
                     ->check(CLI::ExistingFile);
  sub->add_option("--preset", opts.preset,
                  "named preset: desk8 (default) or paper16")
      ->excludes(config);
  sub->add_option("--out", opts.out, "output path (overrides the config)");
  sub->add_option("--workers", opts.workers,
                  "worker threads (overrides the config)");
}

satee::ExperimentConfig load_config(const CommonOpts& opts) {
  satee::ExperimentConfig cfg =
      opts.config_path.empty()
          ? satee::preset_by_name(opts.preset.empty() ? "desk8" : opts.preset)
          : satee::parse_config_file(opts.config_path);
  if (!opts.out.empty()) cfg.output_path = opts.out;
  if (opts.workers > 0) cfg.workers = opts.workers;
  cfg.finalize();
  return cfg;
}

std::filesystem::path mean_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  const std::string stem = p.stem().string();
  const std::string ext = p.extension().string();
  p.replace_filename(stem + "_mean" + ext);
  return p;
}

void write_sweep(const satee::ExperimentConfig& cfg,
                 const std::vector<satee::ResultRow>& rows) {
  satee::write_results_csv(cfg.output_path, rows);
  const auto means = mean_path(cfg.output_path);
  satee::write_mean_csv(means, rows);
  std::cout << rows.size() << " runs -> " << cfg.output_path << " (means: "
            << means.string() << ")\n";
}

int cmd_generate_channel(const CommonOpts& opts, std::uint64_t seed,
                         int users_override) {
  satee::ExperimentConfig cfg = load_config(opts);
  if (cfg.output_path == "results.csv" && opts.out.empty()) {
    cfg.output_path = "channel.txt";
  }
  const int q = users_override > 0 ? users_override : cfg.users_per_beam;
  const satee::ChannelMatrix h = satee::channel_for(cfg, seed, q);
  satee::save_channel(h, cfg.output_path);
  std::cout << "wrote " << h.entries.rows() << "x" << h.entries.cols()
            << " channel (seed " << seed << ") to " << cfg.output_path
            << "\n";
  return 0;
}

int cmd_solve(const CommonOpts& opts, std::uint64_t seed,
              const std::string& channel_path, const std::string& algorithm,
              const std::string& trace_path) {
  satee::ExperimentConfig cfg = load_config(opts);
  satee::SystemParams params = cfg.params;
  satee::ChannelMatrix h;
  if (channel_path.empty()) {
    h = satee::channel_for(cfg, seed, cfg.users_per_beam);
  } else {
    h = satee::load_channel(std::filesystem::path(channel_path));
    h.set_grouping(cfg.users_per_beam);
    params.m_feeds = static_cast<int>(h.entries.cols());
    params.n_beams =
        static_cast<int>(h.entries.rows()) / cfg.users_per_beam;
    params.validate();
  }

  satee::ResultRow row;
  row.seed = seed;
  row.p_t_dbw = satee::watts_to_dbw(params.p_t_watts);
  row.q = cfg.users_per_beam;
  row.algorithm = algorithm;
  int code = 0;

  const auto t0 = std::chrono::steady_clock::now();
  try {
    satee::EvaluationReport rep;
    if (algorithm == "EE-SCA") {
      const satee::PrecoderSolution sol = satee::optimize(h, params);
      rep = sol.report;
      row.iterations = sol.iterations;
      row.converged = sol.converged;
      if (!trace_path.empty()) {
        satee::write_trace_csv(sol.trace,
                               std::filesystem::path(trace_path));
      }
    } else {
      satee::Baseline kind = satee::Baseline::mbim;
      if (algorithm == "RZF") kind = satee::Baseline::rzf;
      if (algorithm == "MMSE") kind = satee::Baseline::mmse;
      const satee::PrecodingMatrix w =
          satee::baseline_precoder(h, params, kind);
      rep = satee::evaluate(h, w, params);
      row.converged = true;
    }
    row.ee = rep.energy_efficiency;
    row.weighted_sum_rate = rep.weighted_sum_rate;
    row.total_power_w = rep.total_power_w;
    row.qos_feasible = rep.qos_feasible;
  } catch (const satee::InfeasibleProblem& e) {
    row.status = "infeasible";
    std::cerr << "infeasible: " << e.what() << "\n";
    code = 2;
  } catch (const satee::SCAFailure& e) {
    row.status = "solver_failure";
    std::cerr << "solver failure: " << e.what() << "\n";
    if (!trace_path.empty()) {
      satee::write_trace_csv(e.trace(), std::filesystem::path(trace_path));
    }
    code = 3;
  } catch (const satee::SolverFailure& e) {
    row.status = "solver_failure";
    std::cerr << "solver failure: " << e.what() << "\n";
    code = 3;
  }
  const auto t1 = std::chrono::steady_clock::now();
  row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();

  if (!cfg.output_path.empty() && cfg.output_path != "results.csv") {
    satee::write_results_csv(cfg.output_path, {row});
  } else if (!opts.out.empty()) {
    satee::write_results_csv(opts.out, {row});
  }

  std::cout << algorithm << " seed=" << seed << " status=" << row.status
            << " ee=" << row.ee << " rate=" << row.weighted_sum_rate
            << " power=" << row.total_power_w << " W"
            << " iterations=" << row.iterations
            << " wall=" << row.wall_time_s << " s\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "satee: energy-efficiency-maximizing multicast precoding for "
      "multibeam satellite downlinks"};
  app.require_subcommand(1);

  CommonOpts gen_opts;
  std::uint64_t gen_seed = 1;
  int gen_users = 0;
  auto* gen = app.add_subcommand("generate-channel",
                                 "draw a channel realization and write it to "
                                 "a text file");
  add_common(gen, gen_opts);
  gen->add_option("--seed", gen_seed, "realization seed");
  gen->add_option("--users", gen_users, "users per beam (overrides config)");

  CommonOpts solve_opts;
  std::uint64_t solve_seed = 1;
  std::string solve_channel;
  std::string solve_algorithm = "EE-SCA";
  std::string solve_trace;
  auto* solve = app.add_subcommand(
      "solve", "design a precoder for one channel realization");
  add_common(solve, solve_opts);
  solve->add_option("--seed", solve_seed, "realization seed");
  solve->add_option("--channel", solve_channel,
                    "read the channel from this file instead of drawing it")
      ->check(CLI::ExistingFile);
  solve->add_option("--algorithm", solve_algorithm, "design to run")
      ->check(CLI::IsMember({"EE-SCA", "RZF", "MMSE", "MBIM-style"}));
  solve->add_option("--trace", solve_trace,
                    "write the per-iteration trace CSV here");

  CommonOpts power_opts;
  auto* power = app.add_subcommand(
      "sweep-power", "sweep the transmit power budget over all seeds");
  add_common(power, power_opts);

  CommonOpts users_opts;
  auto* users = app.add_subcommand(
      "sweep-users", "sweep the multicast group size over all seeds");
  add_common(users, users_opts);

  CommonOpts base_opts;
  auto* base = app.add_subcommand(
      "baselines", "run the closed-form designs at the configured point");
  add_common(base, base_opts);

  int code = 0;
  gen->callback(
      [&] { code = cmd_generate_channel(gen_opts, gen_seed, gen_users); });
  solve->callback([&] {
    code = cmd_solve(solve_opts, solve_seed, solve_channel, solve_algorithm,
                     solve_trace);
  });
  power->callback([&] {
    const satee::ExperimentConfig cfg = load_config(power_opts);
    write_sweep(cfg, satee::run_power_sweep(cfg));
  });
  users->callback([&] {
    const satee::ExperimentConfig cfg = load_config(users_opts);
    write_sweep(cfg, satee::run_user_sweep(cfg));
  });
  base->callback([&] {
    const satee::ExperimentConfig cfg = load_config(base_opts);
    write_sweep(cfg, satee::run_baselines(cfg));
  });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const satee::InfeasibleProblem& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const satee::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
