#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unisac/baselines.hpp"
#include "unisac/bounds.hpp"
#include "unisac/config.hpp"
#include "unisac/metrics.hpp"

namespace unisac {

enum class SimModel { unisac_practical, tin_practical };

SimModel parse_sim_model(const std::string& name);

/// Independent end-to-end trials: assemble, propagate, receive, score.
/// Trial t always uses the stream derived from (seed, t), so the result is
/// identical for any worker count.
AggregateMetrics run_trials(const SystemConfig& cfg, SimModel model, std::int64_t trials,
                            std::uint64_t seed, int workers = 1);

/// Minimum per-user E/N0 at which the simulated receiver meets both targets:
/// 1 dB walk from a bound-guided start, then refinement in `refine_step_db`
/// steps inside the last 1 dB bracket (steps of 1 dB or more skip refinement).
/// A point passes when the one-sided 95% Clopper-Pearson bound on PUPE clears
/// the target and the measured MSEAOA is at or under its target.
RequiredEnergy required_ebn0_practical(const SystemConfig& cfg, SimModel model,
                                       std::int64_t trials, std::uint64_t seed, int workers = 1,
                                       double refine_step_db = 0.25);

struct SweepPoint {
  double x = 0.0;
  std::string model;
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::string figure;
  std::string value_name;  // "ebn0_db" or "mseaoa"
  std::uint64_t config_hash = 0;
  std::vector<SweepPoint> points;
};

enum class SweepScale { desk };

/// Reproduces one of the survey sweeps at the requested scale.
SweepResult reproduce_figure(const std::string& name, SweepScale scale, std::uint64_t seed,
                             int workers = 1);

enum class ExportFormat { csv, plotdata };

/// Byte-stable flat-file export. CSV columns, in order:
/// x, model, <value_name>, stderr, trials, seed, config_hash.
void export_sweep(const SweepResult& result, const std::string& path, ExportFormat format);

/// Inverse of the CSV export; used for round-trip checks and plotting glue.
SweepResult import_sweep_csv(const std::string& path);

}  // namespace unisac
