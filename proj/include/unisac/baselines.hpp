#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unisac/bounds.hpp"
#include "unisac/channel.hpp"
#include "unisac/config.hpp"
#include "unisac/rx.hpp"
#include "unisac/tx.hpp"
#include "unisac/types.hpp"

namespace unisac {

enum class BaselineKind {
  optimistic,
  tdma_ideal,
  tin_ideal,
  tdma_music_ideal,
  aloha_ideal,
  tdma_practical,
  aloha_practical,
  tin_practical,
};

BaselineKind parse_baseline_kind(const std::string& name);
std::string baseline_kind_name(BaselineKind kind);

struct BaselineTargets {
  double eps = 0.1;
  double delta = 5e-4;
};

struct BaselineReport {
  Probability pupe{0.0};
  double mseaoa = 0.0;
  double energy = 0.0;  // per-user E/N0, linear
  bool feasible = true;
  std::string reason;  // set when feasible is false
  // Chosen internal parameters, zero when the model has none.
  int t_subframes = 0;     // ALOHA subframe count
  double len_c = 0.0;      // channel uses per communication user
  double len_s = 0.0;      // channel uses per sensing user
  double rate_c = 0.0;     // communication coding rate
  double shannon_rate = 0.0;  // sum-capacity Monte Carlo mean, optimistic only
  double shannon_se = 0.0;
};

/// Normal-approximation block error rate of an AWGN code of the given rate.
Probability finite_blocklength_bler(double snr, double rate, double n_uses);

/// Diagonal of the angle-estimation CRLB for known per-user signals.
/// `signals` is K x n_uses; throws SingularGramError when the Fisher matrix
/// is not positive definite (K >= m or near-coincident angles).
std::vector<double> crlb_aoa(const std::vector<Aoa>& thetas, const ComplexMatrix& signals,
                             int m, double noise_var);

/// Likelihood-ratio-test misdetection of a power-p signal over n_eff uses.
Probability lrt_misdetection(double p, double n_eff, double delta);

/// Single-user angle CRLB without the mean-centering term of the literal
/// Fisher reduction. Used by every ideal model's closed-form MSEAOA.
double single_user_crlb(double noise_var, double n_uses, double power, int m);

/// Literal single-user reduction of crlb_aoa, centering included.
double single_user_crlb_centered(double noise_var, double n_uses, double power, int m);

/// Closed-form PUPE and MSEAOA of a benchmark model at the powers in cfg.
/// Internal parameters (ALOHA subframes, per-user lengths) are chosen by scan
/// against the targets. Rejects tin_practical, which is simulation-only.
BaselineReport evaluate_ideal_model(BaselineKind kind, const AchievabilityConfig& cfg,
                                    const BaselineTargets& targets, std::uint64_t seed);

/// Single-pass practical interference-as-noise receiver: decode at every grid
/// angle and deduplicate, detect sensing rows by energy, refine each angle
/// from a matched-filter steering estimate. Requires a one-slot layout.
DetectionReport run_tin_practical(const ComplexMatrix& y, const SystemConfig& cfg,
                                  const SensingCodebook& codebook, const PolarCodeSpec& codec,
                                  const CrcSpec& crc);

/// Average per-user E/N0 when each class transmits over its own length.
double per_user_energy(double pbar_c, std::int64_t a_c, double len_c, double pbar_s,
                       std::int64_t a_s, double len_s, double sigma_z2);

/// Minimum per-user E/N0 at which the model meets both targets, by bisection
/// on a common power scale. Throws BracketError when the model cannot meet
/// the targets inside the scan bracket.
RequiredEnergy required_ebn0_ideal(BaselineKind kind, const AchievabilityConfig& cfg,
                                   const BaselineTargets& targets, std::uint64_t seed);

}  // namespace unisac
