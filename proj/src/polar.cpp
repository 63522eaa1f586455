#include "unisac/polar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace unisac {

BitVector crc_parity(const BitVector& bits, const CrcSpec& spec) {
  if (!spec.valid()) throw ValidationError("crc: invalid spec");
  // Long division of bits * x^r by the generator (MSB-first bit order).
  BitVector reg(spec.r, 0);
  auto shift_in = [&](std::uint8_t b) {
    const std::uint8_t out = reg[0];
    for (int i = 0; i + 1 < spec.r; ++i) reg[i] = reg[i + 1];
    reg[spec.r - 1] = b;
    if (out) {
      for (int i = 0; i < spec.r; ++i) {
        if ((spec.poly >> (spec.r - 1 - i)) & 1u) reg[i] ^= 1;
      }
    }
  };
  for (auto b : bits) shift_in(b);
  for (int i = 0; i < spec.r; ++i) shift_in(0);
  return reg;
}

BitVector crc_attach(const BitVector& bits, const CrcSpec& spec) {
  BitVector out = bits;
  const BitVector par = crc_parity(bits, spec);
  out.insert(out.end(), par.begin(), par.end());
  return out;
}

bool crc_check(const BitVector& frame, const CrcSpec& spec) {
  if (static_cast<int>(frame.size()) <= spec.r) throw ShapeError("crc_check: frame shorter than r+1");
  const BitVector msg(frame.begin(), frame.end() - spec.r);
  const BitVector par = crc_parity(msg, spec);
  return std::equal(par.begin(), par.end(), frame.end() - spec.r);
}

namespace {

// Gaussian-approximation phi (Chung et al. style piecewise fit).
// The fitted curve slightly exceeds 1 as x -> 0, so the inverse of a target
// value near 1 settles around phi^-1(1) ~ 0.03 instead of collapsing to an
// absorbing zero. Kept as is: it only affects channels that end up frozen.
double ga_phi(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 10.0) return std::exp(-0.4527 * std::pow(x, 0.86) + 0.0218);
  return std::sqrt(M_PI / x) * std::exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x));
}

double ga_phi_inverse(double y) {
  double lo = 0.0, hi = 1e8;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ga_phi(mid) > y) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> polar_channel_reliabilities(int block_length, double design_snr_db) {
  const double snr = std::pow(10.0, design_snr_db / 10.0);
  // Unit-amplitude BPSK over real AWGN with variance 1/(2 snr): mean LLR 4 snr.
  std::vector<double> mean{4.0 * snr};
  while (static_cast<int>(mean.size()) < block_length) {
    std::vector<double> next(mean.size() * 2);
    for (std::size_t j = 0; j < mean.size(); ++j) {
      const double m = mean[j];
      const double p = ga_phi(m);
      next[2 * j] = ga_phi_inverse(1.0 - (1.0 - p) * (1.0 - p));  // check combine
      next[2 * j + 1] = 2.0 * m;                                  // variable combine
    }
    mean = std::move(next);
  }
  return mean;
}

double rate_matched_design_snr_db(int block_length, int info_count) {
  const double rate = static_cast<double>(info_count) / block_length;
  const double snr = std::pow(2.0, 2.0 * rate) - 1.0;
  return 10.0 * std::log10(snr) + 1.0;
}

PolarCodeSpec construct_code(int block_length, int info_count, double design_snr_db) {
  if (block_length < 1 || (block_length & (block_length - 1)) != 0)
    throw ValidationError("construct_code: block length must be a power of two");
  if (info_count < 1 || info_count > block_length)
    throw std::domain_error("construct_code: info count out of range");
  const std::vector<double> rel = polar_channel_reliabilities(block_length, design_snr_db);
  std::vector<int> order(block_length);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rel[a] > rel[b]; });
  PolarCodeSpec spec;
  spec.block_length = block_length;
  spec.info_count = info_count;
  spec.design_snr_db = design_snr_db;
  spec.info_set.assign(order.begin(), order.begin() + info_count);
  std::sort(spec.info_set.begin(), spec.info_set.end());
  spec.is_info.assign(block_length, 0);
  for (int i : spec.info_set) spec.is_info[i] = 1;
  return spec;
}

BitVector polar_encode(const BitVector& info, const PolarCodeSpec& spec) {
  if (static_cast<int>(info.size()) != spec.info_count)
    throw ShapeError("polar_encode: wrong info length");
  const int n = spec.block_length;
  BitVector x(n, 0);
  for (int i = 0; i < spec.info_count; ++i) x[spec.info_set[i]] = info[i];
  for (int len = 1; len < n; len <<= 1) {
    for (int i = 0; i < n; i += 2 * len) {
      for (int j = i; j < i + len; ++j) x[j] ^= x[j + len];
    }
  }
  return x;
}

ComplexVector bpsk_map(const BitVector& bits, double amplitude) {
  if (!(amplitude > 0.0)) throw std::domain_error("bpsk_map: amplitude must be positive");
  ComplexVector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) v(i) = bits[i] ? -amplitude : amplitude;
  return v;
}

namespace {

// One successive-cancellation path. The split-half f/g recursion below matches
// the natural-order transform x = u F^{xm}: at level L (block size s = n >> L)
// the two halves of the parent block sit at offsets beta and beta + s.
struct SclPath {
  std::vector<std::vector<double>> llr;       // llr[L], size n >> L, L = 1..m (0 is shared)
  std::vector<std::vector<std::uint8_t>> cs;  // cs[L], size 2*(n >> L): [left | right] child codewords
  BitVector u;                                // decided bits, u-domain
  double metric = 0.0;
  bool active = false;
};

inline double f_comb(double a, double b) {
  const double s = (a < 0) == (b < 0) ? 1.0 : -1.0;
  return s * std::min(std::fabs(a), std::fabs(b));
}

class SclDecoder {
 public:
  SclDecoder(const std::vector<double>& channel_llr, const PolarCodeSpec& spec, int list_size)
      : spec_(spec), n_(spec.block_length), list_size_(list_size), chan_(channel_llr) {
    m_ = 0;
    while ((1 << m_) < n_) ++m_;
    paths_.resize(2 * list_size_);
    for (auto& p : paths_) {
      p.llr.resize(m_ + 1);
      p.cs.resize(m_ + 1);
      for (int L = 1; L <= m_; ++L) {
        p.llr[L].assign(n_ >> L, 0.0);
        p.cs[L].assign(2 * (n_ >> L), 0);
      }
      p.cs[0].assign(2 * n_, 0);  // level-0 right half unused
      p.u.assign(n_, 0);
    }
    paths_[0].active = true;
    alive_ = {0};
  }

  std::vector<std::pair<BitVector, double>> run() {
    for (int phase = 0; phase < n_; ++phase) {
      compute_llrs(phase);
      if (spec_.is_info[phase]) {
        split(phase);
      } else {
        for (int id : alive_) {
          SclPath& p = paths_[id];
          const double l = leaf_llr(p);
          if (l < 0) p.metric += -l;  // frozen zero disagrees with the channel
          set_leaf(p, phase, 0);
        }
      }
    }
    std::vector<std::pair<BitVector, double>> out;
    for (int id : alive_) {
      BitVector info(spec_.info_count);
      for (int i = 0; i < spec_.info_count; ++i) info[i] = paths_[id].u[spec_.info_set[i]];
      out.emplace_back(std::move(info), paths_[id].metric);
    }
    return out;
  }

 private:
  const PolarCodeSpec& spec_;
  int n_, m_, list_size_;
  const std::vector<double>& chan_;
  std::vector<SclPath> paths_;
  std::vector<int> alive_;

  const double* level_llr(const SclPath& p, int L) const {
    return L == 0 ? chan_.data() : p.llr[L].data();
  }

  double leaf_llr(const SclPath& p) const { return m_ == 0 ? chan_[0] : p.llr[m_][0]; }

  // Recompute LLR arrays down to the leaf for the current phase.
  void compute_llrs(int phase) {
    // Highest level whose array is stale: number of trailing stages to refresh
    // is determined by the lowest set bits of the phase.
    int start = 1;
    if (phase != 0) {
      int t = phase;
      int k = 0;
      while ((t & 1) == 0) { t >>= 1; ++k; }
      start = m_ - k;  // levels start..m_ need recomputation
    }
    for (int id : alive_) {
      SclPath& p = paths_[id];
      for (int L = start; L <= m_; ++L) {
        const int s = n_ >> L;
        const double* parent = level_llr(p, L - 1);
        const bool g_branch = ((phase >> (m_ - L)) & 1) != 0;
        for (int b = 0; b < s; ++b) {
          if (g_branch) {
            const double sgn = p.cs[L][b] ? -1.0 : 1.0;
            p.llr[L][b] = parent[b + s] + sgn * parent[b];
          } else {
            p.llr[L][b] = f_comb(parent[b], parent[b + s]);
          }
        }
      }
    }
  }

  // Store the decided leaf bit and propagate partial sums upward whenever a
  // right child completes its codeword. cs[L] holds [left | right] child
  // codewords of the active node at level L.
  void set_leaf(SclPath& p, int phase, std::uint8_t bit) {
    p.u[phase] = bit;
    if (m_ == 0) return;
    int L = m_;
    int ph = phase;
    p.cs[m_][(ph & 1) ? 1 : 0] = bit;
    while (L > 1 && (ph & 1)) {
      const int s = n_ >> L;  // child block size
      const std::uint8_t* left = p.cs[L].data();
      const std::uint8_t* right = p.cs[L].data() + s;
      std::uint8_t* dst = p.cs[L - 1].data() + (((ph >> 1) & 1) ? (n_ >> (L - 1)) : 0);
      for (int b = 0; b < s; ++b) {
        dst[b] = static_cast<std::uint8_t>(left[b] ^ right[b]);
        dst[b + s] = right[b];
      }
      --L;
      ph >>= 1;
    }
  }

  void split(int phase) {
    struct Cand {
      int path;
      std::uint8_t bit;
      double metric;
    };
    std::vector<Cand> cands;
    cands.reserve(2 * alive_.size());
    for (int id : alive_) {
      const double l = leaf_llr(paths_[id]);
      const double pen = std::fabs(l);
      cands.push_back({id, 0, paths_[id].metric + (l < 0 ? pen : 0.0)});
      cands.push_back({id, 1, paths_[id].metric + (l >= 0 ? pen : 0.0)});
    }
    const std::size_t keep = std::min<std::size_t>(list_size_, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Cand& a, const Cand& b) { return a.metric < b.metric; });
    cands.resize(keep);

    std::vector<int> survivors_per_path(paths_.size(), 0);
    for (const auto& c : cands) ++survivors_per_path[c.path];

    std::vector<int> free_slots;
    for (int id : alive_) {
      if (survivors_per_path[id] == 0) {
        paths_[id].active = false;
        free_slots.push_back(id);
      }
    }
    for (std::size_t i = 0; i < paths_.size(); ++i) {
      if (!paths_[i].active && survivors_per_path[i] == 0 &&
          std::find(alive_.begin(), alive_.end(), static_cast<int>(i)) == alive_.end())
        free_slots.push_back(static_cast<int>(i));
    }

    std::vector<int> next_alive;
    std::vector<bool> original_used(paths_.size(), false);
    for (const auto& c : cands) {
      int slot = c.path;
      if (original_used[c.path]) {
        slot = free_slots.back();
        free_slots.pop_back();
        clone_into(paths_[slot], paths_[c.path]);
      } else {
        original_used[c.path] = true;
      }
      SclPath& p = paths_[slot];
      p.active = true;
      p.metric = c.metric;
      set_leaf(p, phase, c.bit);
      next_alive.push_back(slot);
    }
    alive_ = std::move(next_alive);
  }

  static void clone_into(SclPath& dst, const SclPath& src) {
    for (std::size_t L = 1; L < src.llr.size(); ++L) dst.llr[L] = src.llr[L];
    dst.cs = src.cs;
    dst.u = src.u;
    dst.metric = src.metric;
  }
};

}  // namespace

std::optional<BitVector> scl_decode(const std::vector<double>& llr, const PolarCodeSpec& spec,
                                    const CrcSpec& crc, int list_size) {
  if (static_cast<int>(llr.size()) != spec.block_length)
    throw ShapeError("scl_decode: llr length mismatch");
  if (list_size < 1) throw std::domain_error("scl_decode: list size must be >= 1");
  SclDecoder dec(llr, spec, list_size);
  auto candidates = dec.run();
  const BitVector* best = nullptr;
  double best_metric = 0.0;
  for (const auto& [info, metric] : candidates) {
    if (!crc_check(info, crc)) continue;
    if (best == nullptr || metric < best_metric) {
      best = &info;
      best_metric = metric;
    }
  }
  if (best == nullptr) return std::nullopt;
  return *best;
}

}  // namespace unisac
