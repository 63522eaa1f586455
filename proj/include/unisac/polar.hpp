#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "unisac/types.hpp"

namespace unisac {

using BitVector = std::vector<std::uint8_t>;

struct CrcSpec {
  int r = 16;
  std::uint32_t poly = 0x1021;  // CRC-16-CCITT by default

  bool valid() const { return r >= 1 && r <= 32 && (poly & 1u) != 0; }
};

/// Parity bits of bits * x^r modulo the generator polynomial.
BitVector crc_parity(const BitVector& bits, const CrcSpec& spec);
BitVector crc_attach(const BitVector& bits, const CrcSpec& spec);
bool crc_check(const BitVector& frame, const CrcSpec& spec);

struct PolarCodeSpec {
  int block_length = 0;  // power of two
  int info_count = 0;
  double design_snr_db = 2.0;
  std::vector<int> info_set;    // ascending, size info_count
  std::vector<std::uint8_t> is_info;  // block_length flags
};

/// Frozen-set selection by Gaussian-approximation density evolution at the
/// given design SNR (treated as Es/N0 in dB for unit-amplitude BPSK).
PolarCodeSpec construct_code(int block_length, int info_count, double design_snr_db = 2.0);

/// Design SNR (dB, real-dimension) matched to the code rate: the Shannon
/// threshold for rate k/n real signaling plus a 1 dB margin. Frozen sets
/// built here stay usable down to the waterfall of the rate they carry,
/// unlike a fixed design point that degrades badly for low-rate codes.
double rate_matched_design_snr_db(int block_length, int info_count);

/// Mean-LLR reliabilities of the synthetic channels, leaf order.
std::vector<double> polar_channel_reliabilities(int block_length, double design_snr_db);

/// x = u F^{xm} with info bits on the information set, zeros frozen.
BitVector polar_encode(const BitVector& info, const PolarCodeSpec& spec);

/// BPSK: bit 0 -> +amplitude, bit 1 -> -amplitude.
ComplexVector bpsk_map(const BitVector& bits, double amplitude);

/// CRC-aided successive-cancellation list decoding. Returns the info bits
/// (CRC parity stripped is NOT done here; the returned vector has info_count
/// bits including the CRC field) of the most likely CRC-passing path, or
/// nullopt when no list candidate passes.
std::optional<BitVector> scl_decode(const std::vector<double>& llr, const PolarCodeSpec& spec,
                                    const CrcSpec& crc, int list_size);

}  // namespace unisac
