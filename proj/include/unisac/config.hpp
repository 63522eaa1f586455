#pragma once

#include <cstdint>
#include <string>

#include "unisac/types.hpp"

namespace unisac {

/// Everything the bound evaluator needs about one operating point.
struct AchievabilityConfig {
  int n = 1024;        // frame length
  int m = 5;           // antennas
  int a_c = 10;        // active communication users
  int a_s = 10;        // active sensing users
  int b_c = 100;       // message bits per communication user
  int b_s = 13;        // sensing codeword index bits
  double pp_c = 1.0;   // per-symbol power P'_c entering the bound
  double pp_s = 1.0;   // per-symbol power P'_s
  double pbar_c = 1.1; // power constraint, >= pp_c
  double pbar_s = 1.1;
  double sigma_z2 = 1.0;
  int n_theta = 2048;       // AOA grid for the bound's Monte Carlo
  int mc_trials = 2000;     // draws in the MSEAOA Monte Carlo
  double trunc_tol = 1e-12; // double-sum tail cutoff, relative
};

/// Full simulation operating point: bound fields plus the practical
/// transceiver's frame, grid, and codec parameters.
struct SystemConfig {
  AchievabilityConfig ach;
  int s_c = 1;          // communication slots
  int s_s = 1;          // sensing slots
  int q_grid = 1024;    // comm-phase peak search grid
  int n_s_grid = 65;    // refinement grid points, odd so 0 is included
  int n_stp = 4;        // refinement steps
  int list_size = 32;   // SCL list
  int crc_r = 16;
  std::uint32_t crc_poly = 0x1021;
  int trials = 200;
  std::uint64_t seed = 1;
  double eps_target = 0.1;     // PUPE target
  double delta_target = 5e-4;  // MSEAOA target

  int n_c() const { return ach.n / s_c; }
  int n_s() const { return ach.n / s_s; }

  /// Throws ValidationError listing every violated constraint.
  void validate() const;
};

/// Flat key=value file with # comments; unknown keys are errors.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);
std::string serialize_config(const SystemConfig& cfg);

/// FNV-1a of the canonical serialization; stable provenance tag.
std::uint64_t config_hash(const SystemConfig& cfg);

}  // namespace unisac
