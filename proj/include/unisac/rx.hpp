#pragma once

#include <utility>
#include <vector>

#include "unisac/config.hpp"
#include "unisac/tx.hpp"
#include "unisac/types.hpp"

namespace unisac {

struct DetectionReport {
  struct CommDecode {
    BitVector message;
    int slot = 0;
  };
  struct SensDetect {
    int row = 0;
    int slot = 0;
    double aoa = 0.0;
  };
  std::vector<CommDecode> messages;
  std::vector<SensDetect> sensing;
  int iterations = 0;
  bool truncated = false;  // iteration cap fired before the fixed point
};

/// Receiver scratch state carried between the alternating phases.
struct RxState {
  struct CommSlot {
    std::vector<BitVector> messages;       // decoded payloads, no duplicates
    std::vector<ComplexVector> signals;    // re-encoded slot signals, length n_c
  };
  std::vector<CommSlot> comm;                  // size s_c
  std::vector<std::pair<int, int>> sens_pairs; // detected (row, slot), distinct
  ComplexMatrix y;         // original received signal, M x n
  ComplexMatrix residual;  // comm-phase input, rebuilt by the sensing phase
  int iteration = 0;
};

/// Interference cancellation inside communication slot `slot`: project out the
/// already-decoded signals, beamform at the energy peak, list-decode, repeat
/// until a CRC failure or all users accounted for.
void comm_phase_slot(RxState& state, int slot, const SystemConfig& cfg,
                     const PolarCodeSpec& codec, const CrcSpec& crc);

/// Rebuilds the residual from the ORIGINAL y by projecting every decoded
/// communication signal out of its slot.
void c_sic(RxState& state, const SystemConfig& cfg);

/// Energy detection of sensing codewords on the current residual, then
/// cancellation of the selected rows from the ORIGINAL y per sensing slot.
void sensing_phase(RxState& state, const SensingCodebook& codebook, const SystemConfig& cfg);

/// One-dimensional refinement: maximize Re(b_theta^H bhat) on a coarse grid,
/// then repeatedly re-grid on a shrinking interval around the argmax.
double refine_aoa(const ComplexVector& bhat, int n_s_grid, int n_stp);

/// Least-squares steering estimates for every detected pair on the post-c_sic
/// residual, refined; order matches state.sens_pairs.
std::vector<double> estimate_aoas(const RxState& state, const SensingCodebook& codebook,
                                  const SystemConfig& cfg);

/// Full alternating receiver. Stops when both detected sets are unchanged
/// across two consecutive iterations, or at the iteration cap.
DetectionReport run_receiver(const ComplexMatrix& y, const SystemConfig& cfg,
                             const SensingCodebook& codebook, const PolarCodeSpec& codec,
                             const CrcSpec& crc, int iteration_cap = 20);

}  // namespace unisac
