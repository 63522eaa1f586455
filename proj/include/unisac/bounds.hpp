#pragma once

#include <cstdint>
#include <vector>

#include "unisac/config.hpp"
#include "unisac/types.hpp"

namespace unisac {

/// Power-constraint violation probability: any active user's empirical
/// per-codeword power exceeding its cap.
Probability p_cons(const AchievabilityConfig& cfg);

/// Upper bound on the collision share of the error rate (same codeword or
/// same message picked by several users), both user classes pooled.
Probability p_coll_bound(const AchievabilityConfig& cfg);

/// Upper bound on the probability that exactly k_s sensing and k_c
/// communication users are decoded in error, clamped to 1.
Probability p_kskc_bound(const AchievabilityConfig& cfg, int k_s, int k_c);

/// Misdetection term: user-count-weighted sum of the clamped table.
Probability p_md_bound(const AchievabilityConfig& cfg);

struct DeltaEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Mean squared AOA error of a grid argmax estimator observing the beam
/// kernel in additive noise of per-antenna variance noise_var. Ties on the
/// grid are broken uniformly at random (they only occur for m = 1).
DeltaEstimate delta_mc(double noise_var, int m, int n_theta, int mc_trials, std::uint64_t seed);

/// Achievable MSEAOA: delta_mc per (K_s, K_c) cell weighted by the clamped,
/// deficit-normalized bound table.
DeltaEstimate delta_achievable(const AchievabilityConfig& cfg, std::uint64_t seed);

struct AchievabilityReport {
  double p_cons = 0.0;
  double p_coll = 0.0;
  double p_md = 0.0;
  double epsilon = 0.0;  // = p_cons + p_coll + p_md
  DeltaEstimate delta;
};

AchievabilityReport evaluate_achievability(const AchievabilityConfig& cfg, std::uint64_t seed);

struct BsSelection {
  int b_s = 0;
  bool capped = false;  // collision vanishes identically; cap returned
};

/// Smallest codeword-index width whose collision bound stays below half the
/// PUPE target. Scans upward from 1; throws BracketError when even the cap
/// fails (the message-collision floor alone can exceed the budget).
BsSelection select_bs(const AchievabilityConfig& cfg, double eps_target, int cap = 60);

struct RequiredEnergy {
  double ebn0_db = 0.0;       // per-user energy over noise at the solution
  double power_scale = 1.0;   // multiplier applied to (pp_c, pp_s)
};

/// Per-user energy ratio (P_c a_c n + P_s a_s n) / ((a_c + a_s) sigma_z^2)
/// for the unslotted bound model, using the powers currently in cfg.
double bound_per_user_energy(const AchievabilityConfig& cfg);

/// Minimum per-user E/N0 meeting both targets, by bisection over a common
/// scale on (pp_c, pp_s) with the power caps set by the headroom rule.
RequiredEnergy required_ebn0_achievable(AchievabilityConfig cfg, double eps_target,
                                        double delta_target, std::uint64_t seed);

}  // namespace unisac
