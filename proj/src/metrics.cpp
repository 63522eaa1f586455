#include "unisac/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "unisac/rng.hpp"

namespace unisac {

TrialScore score_trial(const GroundTruth& truth, const DetectionReport& report) {
  TrialScore s;
  s.active_comm = static_cast<int>(truth.comm.size());
  s.active_sens = static_cast<int>(truth.sens.size());

  std::map<std::pair<int, BitVector>, int> comm_mult;
  for (const auto& u : truth.comm) ++comm_mult[{u.slot, u.message}];
  std::map<std::pair<int, BitVector>, int> decoded;
  for (const auto& d : report.messages) ++decoded[{d.slot, d.message}];
  for (const auto& u : truth.comm) {
    if (comm_mult[{u.slot, u.message}] >= 2)
      ++s.coll_comm;
    else if (decoded.find({u.slot, u.message}) == decoded.end())
      ++s.md_comm;
  }

  std::map<std::pair<int, int>, int> sens_mult;
  for (const auto& u : truth.sens) ++sens_mult[{u.slot, u.row}];
  // Estimates keyed by detected (slot, row).
  std::map<std::pair<int, int>, double> detect;
  for (const auto& d : report.sensing) detect[{d.slot, d.row}] = d.aoa;
  for (const auto& u : truth.sens) {
    if (sens_mult[{u.slot, u.row}] >= 2) {
      ++s.coll_sens;
      continue;
    }
    auto it = detect.find({u.slot, u.row});
    if (it == detect.end()) {
      ++s.md_sens;
    } else {
      const double err = Aoa::wrapped_diff(it->second, u.aoa);
      s.sum_sq_aoa_error += err * err;
      ++s.detected_sens;
    }
  }
  return s;
}

namespace {

struct Totals {
  std::int64_t err = 0, md = 0, coll = 0, active = 0, detected = 0;
  double sq = 0.0;

  void add(const TrialScore& s) {
    md += s.md_comm + s.md_sens;
    coll += s.coll_comm + s.coll_sens;
    err += s.md_comm + s.md_sens + s.coll_comm + s.coll_sens;
    active += s.active_comm + s.active_sens;
    detected += s.detected_sens;
    sq += s.sum_sq_aoa_error;
  }
  double pupe() const { return active ? static_cast<double>(err) / active : 0.0; }
  double mse() const { return detected ? sq / detected : 0.0; }
};

}  // namespace

AggregateMetrics aggregate(const std::vector<TrialScore>& scores, std::uint64_t bootstrap_seed) {
  if (scores.empty()) throw ValidationError("aggregate: need at least one trial");
  Totals t;
  for (const auto& s : scores) t.add(s);
  AggregateMetrics m;
  m.trials = static_cast<std::int64_t>(scores.size());
  m.pupe = t.pupe();
  m.p_md = t.active ? static_cast<double>(t.md) / t.active : 0.0;
  m.p_coll = t.active ? static_cast<double>(t.coll) / t.active : 0.0;
  m.mseaoa_defined = t.detected > 0;
  m.mseaoa = t.mse();

  const int resamples = 200;
  RngStream rng(bootstrap_seed);
  double sp = 0.0, sp2 = 0.0, sm = 0.0, sm2 = 0.0;
  int mse_samples = 0;
  for (int r = 0; r < resamples; ++r) {
    Totals b;
    for (std::size_t i = 0; i < scores.size(); ++i)
      b.add(scores[rng.uniform_index(scores.size())]);
    const double p = b.pupe();
    sp += p;
    sp2 += p * p;
    if (b.detected > 0) {
      const double q = b.mse();
      sm += q;
      sm2 += q * q;
      ++mse_samples;
    }
  }
  auto stddev = [](double s1, double s2, int n) {
    if (n < 2) return 0.0;
    const double var = (s2 - s1 * s1 / n) / (n - 1);
    return var > 0.0 ? std::sqrt(var) : 0.0;
  };
  m.pupe_se = stddev(sp, sp2, resamples);
  m.mseaoa_se = stddev(sm, sm2, mse_samples);
  return m;
}

}  // namespace unisac
