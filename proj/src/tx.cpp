#include "unisac/tx.hpp"

#include <cmath>
#include <string>

namespace unisac {

FrameLayout FrameLayout::make(int n, int s_c, int s_s) {
  if (n < 1 || s_c < 1 || s_s < 1) throw ValidationError("FrameLayout: counts must be positive");
  if (n % s_c != 0) throw ValidationError("FrameLayout: s_c must divide n");
  if (n % s_s != 0) throw ValidationError("FrameLayout: s_s must divide n");
  return FrameLayout{n, s_c, s_s};
}

SensingCodebook build_sensing_codebook(int b_s, const FrameLayout& layout, double p_s,
                                       RngStream& rng) {
  if (b_s < 1) throw ValidationError("build_sensing_codebook: b_s must be >= 1");
  if (b_s > 24)
    throw CapacityError("build_sensing_codebook: 2^" + std::to_string(b_s) +
                        " rows exceed the in-memory cap (2^24); use lazy row generation");
  if (!(p_s > 0.0)) throw ValidationError("build_sensing_codebook: p_s must be positive");
  SensingCodebook cb;
  cb.b_s = b_s;
  cb.p_s = p_s;
  const int ns = layout.n_s();
  const double target = p_s * ns;
  cb.a.resize(Eigen::Index{1} << b_s, ns);
  for (Eigen::Index r = 0; r < cb.a.rows(); ++r) {
    for (int i = 0; i < ns; ++i) cb.a(r, i) = rng.complex_gaussian(1.0);
    cb.a.row(r) *= std::sqrt(target / cb.a.row(r).squaredNorm());
  }
  return cb;
}

TxRecord encode_comm_user(const BitVector& message, const FrameLayout& layout,
                          const PolarCodeSpec& codec, const CrcSpec& crc, double p_c, int slot) {
  if (slot < 0 || slot >= layout.s_c) throw std::domain_error("encode_comm_user: slot out of range");
  if (static_cast<int>(message.size()) + crc.r != codec.info_count)
    throw ShapeError("encode_comm_user: message length plus crc must equal the code dimension");
  if (codec.block_length != layout.n_c())
    throw ShapeError("encode_comm_user: code block length must equal the slot length");
  TxRecord rec;
  rec.role = UserRole::communication;
  rec.slot = slot;
  rec.message = message;
  const BitVector coded = polar_encode(crc_attach(message, crc), codec);
  const ComplexVector sym = bpsk_map(coded, std::sqrt(p_c));
  rec.frame = ComplexVector::Zero(layout.n);
  rec.frame.segment(static_cast<Eigen::Index>(slot) * layout.n_c(), layout.n_c()) = sym;
  return rec;
}

TxRecord encode_sensing_user(const SensingCodebook& codebook, const FrameLayout& layout, int row,
                             int slot) {
  if (row < 0 || row >= codebook.row_count())
    throw std::domain_error("encode_sensing_user: row out of range");
  if (slot < 0 || slot >= layout.s_s)
    throw std::domain_error("encode_sensing_user: slot out of range");
  TxRecord rec;
  rec.role = UserRole::sensing;
  rec.slot = slot;
  rec.codeword_index = row;
  rec.frame = ComplexVector::Zero(layout.n);
  rec.frame.segment(static_cast<Eigen::Index>(slot) * layout.n_s(), layout.n_s()) =
      codebook.row(row);
  return rec;
}

Scenario assemble_scenario(const SystemConfig& cfg, const SensingCodebook& codebook,
                           const PolarCodeSpec& codec, const CrcSpec& crc, RngStream& rng) {
  cfg.validate();
  const FrameLayout layout = FrameLayout::make(cfg.ach.n, cfg.s_c, cfg.s_s);
  Scenario sc;
  for (int u = 0; u < cfg.ach.a_c; ++u) {
    BitVector msg(cfg.ach.b_c);
    for (auto& b : msg) b = rng.bit() ? 1 : 0;
    const int slot = static_cast<int>(rng.uniform_index(cfg.s_c));
    TxRecord rec = encode_comm_user(msg, layout, codec, crc, cfg.ach.pbar_c, slot);
    rec.aoa = Aoa::of(rng.uniform(-1.0, 1.0));
    sc.truth.comm.push_back({msg, slot, rec.aoa.theta});
    sc.users.push_back({rec.aoa, rec.frame, UserRole::communication, u});
    sc.records.push_back(std::move(rec));
  }
  for (int u = 0; u < cfg.ach.a_s; ++u) {
    const int row = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(codebook.row_count())));
    const int slot = static_cast<int>(rng.uniform_index(cfg.s_s));
    TxRecord rec = encode_sensing_user(codebook, layout, row, slot);
    rec.aoa = Aoa::of(rng.uniform(-1.0, 1.0));
    sc.truth.sens.push_back({row, slot, rec.aoa.theta});
    sc.users.push_back({rec.aoa, rec.frame, UserRole::sensing, cfg.ach.a_c + u});
    sc.records.push_back(std::move(rec));
  }
  return sc;
}

}  // namespace unisac
