// SPDX-License-Identifier: Apache-2.0
//
// satee: energy-efficient multicast precoding for multibeam satellite downlinks
//
// Microbenchmarks for the hot paths: channel synthesis, subproblem assembly,
// one cone solve, and the closed-form designs.

#include <benchmark/benchmark.h>

#include "satee/baselines.hpp"
#include "satee/channel.hpp"
#include "satee/cone_solver.hpp"
#include "satee/config.hpp"
#include "satee/ee_precoder.hpp"
#include "satee/experiment.hpp"
#include "satee/subproblem.hpp"

namespace {

satee::ExperimentConfig small_config(int beams, int users_per_beam) {
  satee::ExperimentConfig cfg = satee::desk8_preset();
  cfg.geometry.beam_centers =
      satee::hex_beam_centers(beams, 1.7320508075688772 *
                                         cfg.geometry.coverage_radius_m);
  cfg.geometry.feed_centers.clear();
  cfg.users_per_beam = users_per_beam;
  cfg.params.gamma_bar.resize(0);
  cfg.finalize();
  return cfg;
}

void BM_ChannelGeneration(benchmark::State& state) {
  const satee::ExperimentConfig cfg =
      small_config(static_cast<int>(state.range(0)), 2);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const satee::UserLayout layout =
        satee::make_uniform_layout(cfg.geometry, 2, seed);
    const satee::ChannelMatrix h =
        satee::generate_channel(cfg.geometry, layout, seed);
    benchmark::DoNotOptimize(h.entries.sum());
    ++seed;
  }
}
BENCHMARK(BM_ChannelGeneration)->Arg(4)->Arg(8)->Arg(16);

void BM_SubproblemBuild(benchmark::State& state) {
  const satee::ExperimentConfig cfg =
      small_config(static_cast<int>(state.range(0)), 2);
  satee::ChannelMatrix h = satee::channel_for(cfg, 1, 2);
  const satee::ExpansionPoint point =
      satee::initial_expansion_point(h, cfg.params);
  for (auto _ : state) {
    const satee::EeSubproblem sub =
        satee::build_ee_subproblem(h, cfg.params, point);
    benchmark::DoNotOptimize(sub.program.objective.size());
  }
}
BENCHMARK(BM_SubproblemBuild)->Arg(4)->Arg(8);

void BM_SubproblemSolve(benchmark::State& state) {
  const satee::ExperimentConfig cfg =
      small_config(static_cast<int>(state.range(0)), 2);
  satee::ChannelMatrix h = satee::channel_for(cfg, 1, 2);
  const satee::ExpansionPoint point =
      satee::initial_expansion_point(h, cfg.params);
  const satee::EeSubproblem sub =
      satee::build_ee_subproblem(h, cfg.params, point);
  for (auto _ : state) {
    const satee::SolveOutcome outcome = satee::solve(sub.program, {});
    benchmark::DoNotOptimize(outcome.objective);
  }
}
BENCHMARK(BM_SubproblemSolve)->Arg(4)->Arg(8);

void BM_BaselinePrecoder(benchmark::State& state) {
  const satee::ExperimentConfig cfg = small_config(8, 2);
  satee::ChannelMatrix h = satee::channel_for(cfg, 1, 2);
  const auto kind = static_cast<satee::Baseline>(state.range(0));
  for (auto _ : state) {
    const satee::PrecodingMatrix w =
        satee::baseline_precoder(h, cfg.params, kind);
    benchmark::DoNotOptimize(w.w.sum());
  }
}
BENCHMARK(BM_BaselinePrecoder)
    ->Arg(static_cast<int>(satee::Baseline::rzf))
    ->Arg(static_cast<int>(satee::Baseline::mmse))
    ->Arg(static_cast<int>(satee::Baseline::mbim));

void BM_FullDesign(benchmark::State& state) {
  const satee::ExperimentConfig cfg =
      small_config(static_cast<int>(state.range(0)), 1);
  satee::ChannelMatrix h =
      satee::channel_for(cfg, 1, cfg.users_per_beam);
  for (auto _ : state) {
    const satee::PrecoderSolution sol = satee::optimize(h, cfg.params);
    benchmark::DoNotOptimize(sol.report.energy_efficiency);
  }
}
BENCHMARK(BM_FullDesign)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
