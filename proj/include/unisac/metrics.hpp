#pragma once

#include <cstdint>
#include <vector>

#include "unisac/rx.hpp"
#include "unisac/tx.hpp"

namespace unisac {

struct TrialScore {
  int md_comm = 0;
  int md_sens = 0;
  int coll_comm = 0;
  int coll_sens = 0;
  int detected_sens = 0;  // correctly detected, collision-free; AOA scored
  double sum_sq_aoa_error = 0.0;
  int active_comm = 0;
  int active_sens = 0;
};

/// Compares the ground truth with a receiver report. Users in collision count
/// only toward the collision lists, never toward misdetection.
TrialScore score_trial(const GroundTruth& truth, const DetectionReport& report);

struct AggregateMetrics {
  double pupe = 0.0;
  double p_md = 0.0;
  double p_coll = 0.0;
  double mseaoa = 0.0;
  double pupe_se = 0.0;
  double mseaoa_se = 0.0;
  bool mseaoa_defined = false;  // false when no sensing user was ever scored
  std::int64_t trials = 0;
};

/// Ratio-of-sums estimators with bootstrap standard errors (200 resamples,
/// deterministic given bootstrap_seed).
AggregateMetrics aggregate(const std::vector<TrialScore>& scores,
                           std::uint64_t bootstrap_seed = 0x0b007'57a9ULL);

}  // namespace unisac
