// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks

#include "satee/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "satee/baselines.hpp"
#include "satee/errors.hpp"
#include "satee/metrics.hpp"

namespace satee {

namespace {

/// Everything that varies between runs of one sweep.
struct TaskSpec {
  std::uint64_t seed = 0;
  int users_per_beam = 0;
  double p_t_watts = 0.0;
  double p_t_dbw = 0.0;
  std::string algorithm;
};

Baseline baseline_kind(const std::string& algorithm) {
  if (algorithm == "RZF") return Baseline::rzf;
  if (algorithm == "MMSE") return Baseline::mmse;
  return Baseline::mbim;
}

SingleRun execute(const ExperimentConfig& cfg, const TaskSpec& task) {
  SingleRun run;
  run.row.seed = task.seed;
  run.row.p_t_dbw = task.p_t_dbw;
  run.row.q = task.users_per_beam;
  run.row.algorithm = task.algorithm;

  SystemParams params = cfg.params;
  params.users_per_beam = task.users_per_beam;
  params.p_t_watts = task.p_t_watts;

  const ChannelMatrix h = channel_for(cfg, task.seed, task.users_per_beam);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (task.algorithm == "EE-SCA") {
      run.solution = optimize(h, params);
      run.has_solution = true;
      const EvaluationReport& rep = run.solution.report;
      run.row.ee = rep.energy_efficiency;
      run.row.weighted_sum_rate = rep.weighted_sum_rate;
      run.row.total_power_w = rep.total_power_w;
      run.row.qos_feasible = rep.qos_feasible;
      run.row.iterations = run.solution.iterations;
      run.row.converged = run.solution.converged;
    } else {
      const PrecodingMatrix w =
          baseline_precoder(h, params, baseline_kind(task.algorithm));
      const EvaluationReport rep = evaluate(h, w, params);
      run.row.ee = rep.energy_efficiency;
      run.row.weighted_sum_rate = rep.weighted_sum_rate;
      run.row.total_power_w = rep.total_power_w;
      run.row.qos_feasible = rep.qos_feasible;
      run.row.iterations = 0;
      run.row.converged = true;
    }
  } catch (const InfeasibleProblem&) {
    run.row.status = "infeasible";
  } catch (const SolverFailure&) {
    run.row.status = "solver_failure";
  }
  const auto t1 = std::chrono::steady_clock::now();
  run.row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
  return run;
}

std::vector<ResultRow> run_tasks(const ExperimentConfig& cfg,
                                 const std::vector<TaskSpec>& tasks) {
  std::vector<ResultRow> rows(tasks.size());
  const int threads = std::max(
      1, std::min<int>(cfg.workers, static_cast<int>(tasks.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      rows[i] = execute(cfg, tasks[i]).row;
    }
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) break;
        try {
          rows[i] = execute(cfg, tasks[i]).row;
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

}  // namespace

ChannelMatrix channel_for(const ExperimentConfig& cfg, std::uint64_t seed,
                          int users_per_beam) {
  UserLayout layout = make_uniform_layout(cfg.geometry, users_per_beam, seed);
  const int beams = cfg.geometry.beam_count();
  for (const auto& [beam, slot] : cfg.virtual_slots) {
    if (beam < beams && slot < users_per_beam) {
      layout.virtual_mask[static_cast<std::size_t>(beam * users_per_beam +
                                                   slot)] = true;
    }
  }
  ChannelMatrix h = generate_channel(cfg.geometry, layout, seed);
  h.set_grouping(users_per_beam);
  return h;
}

SingleRun run_single(const ExperimentConfig& cfg, std::uint64_t seed,
                     const std::string& algorithm) {
  TaskSpec task;
  task.seed = seed;
  task.users_per_beam = cfg.users_per_beam;
  task.p_t_watts = cfg.params.p_t_watts;
  task.p_t_dbw = watts_to_dbw(cfg.params.p_t_watts);
  task.algorithm = algorithm;
  return execute(cfg, task);
}

std::vector<ResultRow> run_power_sweep(const ExperimentConfig& cfg) {
  std::vector<TaskSpec> tasks;
  for (double p_dbw : cfg.sweep_p_t_dbw) {
    for (std::uint64_t seed : cfg.seeds) {
      for (const auto& algorithm : cfg.algorithms) {
        TaskSpec t;
        t.seed = seed;
        t.users_per_beam = cfg.users_per_beam;
        t.p_t_watts = dbw_to_watts(p_dbw);
        t.p_t_dbw = p_dbw;
        t.algorithm = algorithm;
        tasks.push_back(std::move(t));
      }
    }
  }
  return run_tasks(cfg, tasks);
}

std::vector<ResultRow> run_user_sweep(const ExperimentConfig& cfg) {
  std::vector<TaskSpec> tasks;
  const double p_dbw = watts_to_dbw(cfg.params.p_t_watts);
  for (int q : cfg.sweep_users) {
    for (std::uint64_t seed : cfg.seeds) {
      for (const auto& algorithm : cfg.algorithms) {
        TaskSpec t;
        t.seed = seed;
        t.users_per_beam = q;
        t.p_t_watts = cfg.params.p_t_watts;
        t.p_t_dbw = p_dbw;
        t.algorithm = algorithm;
        tasks.push_back(std::move(t));
      }
    }
  }
  return run_tasks(cfg, tasks);
}

std::vector<ResultRow> run_baselines(const ExperimentConfig& cfg) {
  std::vector<TaskSpec> tasks;
  const double p_dbw = watts_to_dbw(cfg.params.p_t_watts);
  for (std::uint64_t seed : cfg.seeds) {
    for (const auto& algorithm : cfg.algorithms) {
      if (algorithm == "EE-SCA") continue;
      TaskSpec t;
      t.seed = seed;
      t.users_per_beam = cfg.users_per_beam;
      t.p_t_watts = cfg.params.p_t_watts;
      t.p_t_dbw = p_dbw;
      t.algorithm = algorithm;
      tasks.push_back(std::move(t));
    }
  }
  return run_tasks(cfg, tasks);
}

std::vector<MeanRow> mean_rows(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<double, int, std::string>, MeanRow> groups;
  for (const auto& row : rows) {
    if (row.status != "ok") continue;
    auto& g = groups[{row.p_t_dbw, row.q, row.algorithm}];
    if (g.runs == 0) {
      g.p_t_dbw = row.p_t_dbw;
      g.q = row.q;
      g.algorithm = row.algorithm;
    }
    ++g.runs;
    g.mean_ee += row.ee;
    g.mean_weighted_sum_rate += row.weighted_sum_rate;
    g.mean_total_power_w += row.total_power_w;
  }
  std::vector<MeanRow> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) {
    g.mean_ee /= g.runs;
    g.mean_weighted_sum_rate /= g.runs;
    g.mean_total_power_w /= g.runs;
    out.push_back(std::move(g));
  }
  return out;
}

void write_results_csv(const std::filesystem::path& path,
                       const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("results: cannot open " + path.string());
  }
  out << std::setprecision(12);
  out << "seed,p_t_dbw,q,algorithm,ee,weighted_sum_rate,total_power_w,"
         "qos_feasible,iterations,converged,wall_time_s,status\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.p_t_dbw << ',' << r.q << ',' << r.algorithm
        << ',' << r.ee << ',' << r.weighted_sum_rate << ','
        << r.total_power_w << ',' << (r.qos_feasible ? 1 : 0) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ','
        << r.wall_time_s << ',' << r.status << '\n';
  }
  if (!out) {
    throw std::runtime_error("results: write failed for " + path.string());
  }
}

void write_mean_csv(const std::filesystem::path& path,
                    const std::vector<ResultRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("results: cannot open " + path.string());
  }
  out << std::setprecision(12);
  out << "p_t_dbw,q,algorithm,runs,mean_ee,mean_weighted_sum_rate,"
         "mean_total_power_w\n";
  for (const auto& g : mean_rows(rows)) {
    out << g.p_t_dbw << ',' << g.q << ',' << g.algorithm << ',' << g.runs
        << ',' << g.mean_ee << ',' << g.mean_weighted_sum_rate << ','
        << g.mean_total_power_w << '\n';
  }
  if (!out) {
    throw std::runtime_error("results: write failed for " + path.string());
  }
}

}  // namespace satee
