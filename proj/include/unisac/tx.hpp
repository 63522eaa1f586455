#pragma once

#include <cstdint>
#include <vector>

#include "unisac/channel.hpp"
#include "unisac/config.hpp"
#include "unisac/polar.hpp"
#include "unisac/rng.hpp"
#include "unisac/types.hpp"

namespace unisac {

/// Slotted frame: n channel uses split into s_c communication slots of n_c
/// uses and, independently, s_s sensing slots of n_s uses. Both user classes
/// share the same n uses, so slots of the two kinds overlap.
struct FrameLayout {
  int n = 0;
  int s_c = 1;
  int s_s = 1;

  int n_c() const { return n / s_c; }
  int n_s() const { return n / s_s; }

  static FrameLayout make(int n, int s_c, int s_s);
};

/// 2^{b_s} random rows, each rescaled so its energy is exactly p_s * n_s.
/// Stored stacked (rows x n_s) so the receiver's energy scan is one product.
struct SensingCodebook {
  int b_s = 0;
  double p_s = 1.0;
  ComplexMatrix a;  // 2^{b_s} x n_s

  Eigen::Index row_count() const { return a.rows(); }
  ComplexVector row(Eigen::Index i) const { return a.row(i).transpose(); }
};

SensingCodebook build_sensing_codebook(int b_s, const FrameLayout& layout, double p_s,
                                       RngStream& rng);

struct TxRecord {
  UserRole role = UserRole::communication;
  int slot = 0;
  BitVector message;       // communication users: the b_c payload bits
  int codeword_index = 0;  // sensing users: row into the codebook
  Aoa aoa;
  ComplexVector frame;  // length n, zero outside the slot
};

/// CRC attach, polar encode, BPSK at amplitude sqrt(p_c), slot placement.
TxRecord encode_comm_user(const BitVector& message, const FrameLayout& layout,
                          const PolarCodeSpec& codec, const CrcSpec& crc, double p_c, int slot);

TxRecord encode_sensing_user(const SensingCodebook& codebook, const FrameLayout& layout, int row,
                             int slot);

struct GroundTruth {
  struct CommUser {
    BitVector message;
    int slot = 0;
    double aoa = 0.0;
  };
  struct SensUser {
    int row = 0;
    int slot = 0;
    double aoa = 0.0;
  };
  std::vector<CommUser> comm;
  std::vector<SensUser> sens;
};

struct Scenario {
  std::vector<UserTransmission> users;
  std::vector<TxRecord> records;
  GroundTruth truth;
};

/// Draws a_c random messages and a_s random (row, slot) pairs, all slots and
/// AOAs uniform, and synthesizes every frame signal.
Scenario assemble_scenario(const SystemConfig& cfg, const SensingCodebook& codebook,
                           const PolarCodeSpec& codec, const CrcSpec& crc, RngStream& rng);

}  // namespace unisac
