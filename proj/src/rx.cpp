#include "unisac/rx.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "unisac/numerics.hpp"

namespace unisac {

namespace {

// Steering matrix for a uniform grid of q angles covering [-1, 1).
ComplexMatrix steering_grid(int m, int q) {
  ComplexMatrix b(m, q);
  for (int i = 0; i < q; ++i) b.col(i) = steering_vector(-1.0 + 2.0 * i / q, m);
  return b;
}

ComplexMatrix stack_rows(const std::vector<ComplexVector>& rows, Eigen::Index cols) {
  ComplexMatrix a(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return a;
}

int total_decoded(const RxState& state) {
  int t = 0;
  for (const auto& s : state.comm) t += static_cast<int>(s.messages.size());
  return t;
}

using Snapshot = std::pair<std::vector<std::pair<int, BitVector>>, std::vector<std::pair<int, int>>>;

Snapshot snapshot(const RxState& state) {
  Snapshot s;
  for (std::size_t i = 0; i < state.comm.size(); ++i)
    for (const auto& msg : state.comm[i].messages) s.first.emplace_back(static_cast<int>(i), msg);
  std::sort(s.first.begin(), s.first.end());
  s.second = state.sens_pairs;
  std::sort(s.second.begin(), s.second.end());
  return s;
}

}  // namespace

void comm_phase_slot(RxState& state, int slot, const SystemConfig& cfg,
                     const PolarCodeSpec& codec, const CrcSpec& crc) {
  const int n_c = cfg.n_c();
  const int m = cfg.ach.m;
  const double p_c = cfg.ach.pbar_c;
  auto& cs = state.comm[static_cast<std::size_t>(slot)];
  const ComplexMatrix y_slot = state.residual.middleCols(static_cast<Eigen::Index>(slot) * n_c, n_c);
  const ComplexMatrix b_grid = steering_grid(m, cfg.q_grid);

  while (total_decoded(state) < cfg.ach.a_c) {
    ComplexMatrix yp;
    try {
      yp = project_residual(y_slot, stack_rows(cs.signals, n_c));
    } catch (const SingularGramError&) {
      // A nearly dependent re-encoded signal slipped in; drop the newest and
      // let the next outer iteration revisit this slot.
      cs.signals.pop_back();
      cs.messages.pop_back();
      break;
    }
    // Peak search: E_theta = ||Re(b_theta^H Y')||^2 over the angle grid.
    const ComplexMatrix corr = b_grid.adjoint() * yp;  // q x n_c
    int best = 0;
    double best_e = -1.0;
    for (int i = 0; i < cfg.q_grid; ++i) {
      const double e = corr.row(i).real().squaredNorm();
      if (e > best_e) {
        best_e = e;
        best = i;
      }
    }
    const Eigen::RowVectorXcd r = corr.row(best);
    // Interference-plus-noise power seen by the beamformed symbol estimate.
    const double ahat_energy = r.squaredNorm() / (static_cast<double>(m) * m);
    double sigma_in = ahat_energy / n_c - p_c;
    sigma_in = std::max(sigma_in, 1e-6 * p_c);
    std::vector<double> llr(static_cast<std::size_t>(n_c));
    const double scale = 2.0 * std::sqrt(p_c) / (m * sigma_in);
    for (int j = 0; j < n_c; ++j) llr[static_cast<std::size_t>(j)] = scale * r(j).real();
    auto dec = scl_decode(llr, codec, crc, cfg.list_size);
    if (!dec.has_value()) break;
    BitVector payload(dec->begin(), dec->end() - crc.r);
    if (std::find(cs.messages.begin(), cs.messages.end(), payload) != cs.messages.end()) break;
    cs.messages.push_back(std::move(payload));
    ComplexVector sig = bpsk_map(polar_encode(*dec, codec), std::sqrt(p_c));
    cs.signals.push_back(std::move(sig));
  }
}

void c_sic(RxState& state, const SystemConfig& cfg) {
  const int n_c = cfg.n_c();
  state.residual = state.y;
  for (int slot = 0; slot < cfg.s_c; ++slot) {
    const auto& cs = state.comm[static_cast<std::size_t>(slot)];
    if (cs.signals.empty()) continue;
    const Eigen::Index start = static_cast<Eigen::Index>(slot) * n_c;
    state.residual.middleCols(start, n_c) =
        project_residual(state.y.middleCols(start, n_c), stack_rows(cs.signals, n_c));
  }
}

void sensing_phase(RxState& state, const SensingCodebook& codebook, const SystemConfig& cfg) {
  const int n_s = cfg.n_s();
  state.sens_pairs.clear();
  if (cfg.ach.a_s > 0) {
    std::vector<std::tuple<double, int, int>> scored;  // (-energy, row, slot)
    for (int slot = 0; slot < cfg.s_s; ++slot) {
      const Eigen::Index start = static_cast<Eigen::Index>(slot) * n_s;
      // Energy of every codeword against this slot of the residual, in one
      // product: column i of Y A^H is Y a_i^H.
      const ComplexMatrix corr = state.residual.middleCols(start, n_s) * codebook.a.adjoint();
      const RealVector e = corr.colwise().squaredNorm();
      for (Eigen::Index row = 0; row < codebook.row_count(); ++row)
        scored.emplace_back(-e(row), static_cast<int>(row), slot);
    }
    const std::size_t keep = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(cfg.ach.a_s));
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end());
    for (std::size_t i = 0; i < keep; ++i)
      state.sens_pairs.emplace_back(std::get<1>(scored[i]), std::get<2>(scored[i]));
  }
  // S-SIC against the original signal, slot by slot.
  state.residual = state.y;
  for (int slot = 0; slot < cfg.s_s; ++slot) {
    std::vector<ComplexVector> rows;
    for (const auto& [row, sl] : state.sens_pairs)
      if (sl == slot) rows.push_back(codebook.row(row));
    if (rows.empty()) continue;
    const Eigen::Index start = static_cast<Eigen::Index>(slot) * n_s;
    state.residual.middleCols(start, n_s) =
        project_residual(state.y.middleCols(start, n_s), stack_rows(rows, n_s));
  }
}

double refine_aoa(const ComplexVector& bhat, int n_s_grid, int n_stp) {
  const int m = static_cast<int>(bhat.size());
  auto objective = [&](double theta) {
    return (steering_vector(theta, m).adjoint() * bhat)(0).real();
  };
  auto grid_argmax = [&](double lo, double hi) {
    double best_t = lo, best_v = -1e300;
    for (int i = 0; i < n_s_grid; ++i) {
      const double t = lo + (hi - lo) * i / (n_s_grid - 1);
      const double v = objective(t);
      if (v > best_v) {
        best_v = v;
        best_t = t;
      }
    }
    return best_t;
  };
  double est = grid_argmax(-1.0, 1.0);
  for (int k = 1; k <= n_stp; ++k) {
    const double half = std::pow(2.0, k) / std::pow(static_cast<double>(n_s_grid), k);
    est = grid_argmax(est - half, est + half);
  }
  return Aoa::wrap(est);
}

std::vector<double> estimate_aoas(const RxState& state, const SensingCodebook& codebook,
                                  const SystemConfig& cfg) {
  const int n_s = cfg.n_s();
  std::vector<double> out(state.sens_pairs.size(), 0.0);
  for (int slot = 0; slot < cfg.s_s; ++slot) {
    std::vector<std::size_t> idx;
    std::vector<ComplexVector> rows;
    for (std::size_t i = 0; i < state.sens_pairs.size(); ++i)
      if (state.sens_pairs[i].second == slot) {
        idx.push_back(i);
        rows.push_back(codebook.row(state.sens_pairs[i].first));
      }
    if (rows.empty()) continue;
    const Eigen::Index start = static_cast<Eigen::Index>(slot) * n_s;
    // Column j of the fit is the steering estimate for pair idx[j].
    const ComplexMatrix bhat =
        ls_fit(state.residual.middleCols(start, n_s), stack_rows(rows, n_s));
    for (std::size_t j = 0; j < idx.size(); ++j)
      out[idx[j]] = refine_aoa(bhat.col(static_cast<Eigen::Index>(j)), cfg.n_s_grid, cfg.n_stp);
  }
  return out;
}

DetectionReport run_receiver(const ComplexMatrix& y, const SystemConfig& cfg,
                             const SensingCodebook& codebook, const PolarCodeSpec& codec,
                             const CrcSpec& crc, int iteration_cap) {
  if (y.rows() != cfg.ach.m || y.cols() != cfg.ach.n)
    throw ShapeError("run_receiver: y must be m x n");
  RxState state;
  state.y = y;
  state.residual = y;
  state.comm.resize(static_cast<std::size_t>(cfg.s_c));
  DetectionReport report;
  Snapshot prev;
  bool fixed_point = false;
  for (state.iteration = 1; state.iteration <= iteration_cap; ++state.iteration) {
    for (int slot = 0; slot < cfg.s_c; ++slot) comm_phase_slot(state, slot, cfg, codec, crc);
    c_sic(state, cfg);
    sensing_phase(state, codebook, cfg);
    Snapshot cur = snapshot(state);
    report.iterations = state.iteration;
    if (state.iteration > 1 && cur == prev) {
      fixed_point = true;
      break;
    }
    prev = std::move(cur);
  }
  report.truncated = !fixed_point;
  // AOA estimation wants comm interference removed but sensing signals intact.
  c_sic(state, cfg);
  const std::vector<double> aoas = estimate_aoas(state, codebook, cfg);
  for (std::size_t i = 0; i < state.comm.size(); ++i)
    for (const auto& msg : state.comm[i].messages)
      report.messages.push_back({msg, static_cast<int>(i)});
  for (std::size_t i = 0; i < state.sens_pairs.size(); ++i)
    report.sensing.push_back({state.sens_pairs[i].first, state.sens_pairs[i].second, aoas[i]});
  return report;
}

}  // namespace unisac
