#include "unisac/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "unisac/channel.hpp"
#include "unisac/numerics.hpp"
#include "unisac/rng.hpp"

namespace unisac {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Collision sum for one user class: sum_{i>=2} i C(a, i) 2^{-b(i-1)},
// with logC updated incrementally along i.
double class_collision_sum(int a, int b) {
  if (a < 2) return 0.0;
  double log_c = log_binomial(a, 2);
  double total = 0.0;
  for (int i = 2; i <= a; ++i) {
    total += std::exp(std::log(static_cast<double>(i)) + log_c - (i - 1.0) * b * kLn2);
    log_c += std::log((a - i) / (i + 1.0));  // C(a,i) -> C(a,i+1)
  }
  return total;
}

}  // namespace

Probability p_cons(const AchievabilityConfig& cfg) {
  double log_pass = 0.0;
  const int dof = 2 * cfg.n;
  if (cfg.a_s > 0) {
    const double f = chi_squared_cdf(dof, dof * cfg.pbar_s / cfg.pp_s);
    if (f <= 0.0) return Probability(1.0);
    log_pass += cfg.a_s * std::log(f);
  }
  if (cfg.a_c > 0) {
    const double f = chi_squared_cdf(dof, dof * cfg.pbar_c / cfg.pp_c);
    if (f <= 0.0) return Probability(1.0);
    log_pass += cfg.a_c * std::log(f);
  }
  return Probability::clamped(-std::expm1(log_pass));
}

Probability p_coll_bound(const AchievabilityConfig& cfg) {
  const int total_users = cfg.a_c + cfg.a_s;
  if (total_users == 0) return Probability(0.0);
  const double expected =
      class_collision_sum(cfg.a_s, cfg.b_s) + class_collision_sum(cfg.a_c, cfg.b_c);
  return Probability::clamped(expected / total_users);
}

namespace {

double log_p_kskc(const AchievabilityConfig& cfg, int k_s, int k_c) {
  if (k_s > cfg.a_s || k_c > cfg.a_c)
    return -std::numeric_limits<double>::infinity();
  const double l_sc = log_binomial_log2pop(cfg.b_s, static_cast<std::uint64_t>(k_s)) +
                      log_binomial(cfg.a_s, static_cast<std::uint64_t>(k_s)) +
                      log_binomial_log2pop(cfg.b_c, static_cast<std::uint64_t>(k_c)) +
                      log_binomial(cfg.a_c, static_cast<std::uint64_t>(k_c));
  // Deviation terms dropped: the decoding-error exponent keeps only the
  // dominant interference power k_c pp_c + k_s pp_s.
  const double sigma_t2 = k_c * cfg.pp_c + k_s * cfg.pp_s;
  const double penalty =
      static_cast<double>(cfg.n) * cfg.m * std::log1p(0.25 * sigma_t2 / cfg.sigma_z2);
  return l_sc - penalty;
}

// Per-class combinatorial prefactor log(C(2^width, k) C(a, k)) for k = 0..a.
std::vector<double> log_choose_vector(int width, int a) {
  std::vector<double> v(static_cast<std::size_t>(a) + 1);
  for (int k = 0; k <= a; ++k)
    v[static_cast<std::size_t>(k)] = log_binomial_log2pop(width, static_cast<std::uint64_t>(k)) +
                                     log_binomial(a, static_cast<std::uint64_t>(k));
  return v;
}

}  // namespace

Probability p_kskc_bound(const AchievabilityConfig& cfg, int k_s, int k_c) {
  const double lp = log_p_kskc(cfg, k_s, k_c);
  return Probability::clamped(lp >= 0.0 ? 1.0 : std::exp(lp));
}

Probability p_md_bound(const AchievabilityConfig& cfg) {
  const int total_users = cfg.a_c + cfg.a_s;
  if (total_users == 0) return Probability(0.0);
  const std::vector<double> lc_s = log_choose_vector(cfg.b_s, cfg.a_s);
  const std::vector<double> lc_c = log_choose_vector(cfg.b_c, cfg.a_c);
  const double nm = static_cast<double>(cfg.n) * cfg.m;
  double total = 0.0;
  double prev_row = -1.0;
  for (int k_s = 0; k_s <= cfg.a_s; ++k_s) {
    double row = 0.0;
    double prev_term = -1.0;
    for (int k_c = 0; k_c <= cfg.a_c; ++k_c) {
      if (k_s == 0 && k_c == 0) continue;  // zero weight
      const double lp = lc_s[k_s] + lc_c[k_c] -
                        nm * std::log1p(0.25 * (k_c * cfg.pp_c + k_s * cfg.pp_s) / cfg.sigma_z2);
      const double p = std::exp(std::min(0.0, lp));
      const double term = (k_s + k_c) / static_cast<double>(total_users) * p;
      row += term;
      // The log-term is concave in k_c, so once it decays below the cutoff
      // the remaining tail is negligible.
      if (prev_term >= 0.0 && term < prev_term && term < cfg.trunc_tol * std::max(total + row, 1e-300))
        break;
      prev_term = term;
    }
    total += row;
    if (prev_row >= 0.0 && row < prev_row && row < cfg.trunc_tol * std::max(total, 1e-300)) break;
    prev_row = row;
  }
  return Probability::clamped(total);
}

DeltaEstimate delta_mc(double noise_var, int m, int n_theta, int mc_trials, std::uint64_t seed) {
  if (noise_var < 0.0) throw ValidationError("delta_mc: negative noise variance");
  ComplexMatrix b(m, n_theta);
  RealVector fe(n_theta), theta(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    theta(i) = -1.0 + 2.0 * i / n_theta;
    b.col(i) = steering_vector(theta(i), m);
    fe(i) = f_e_kernel(theta(i), m);
  }
  RngStream rng(seed);
  ComplexVector z(m);
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < mc_trials; ++t) {
    for (int i = 0; i < m; ++i) z(i) = noise_var > 0.0 ? rng.complex_gaussian(noise_var) : Complex(0.0);
    const RealVector score = fe + (b.adjoint() * z).real();
    // Argmax with uniform tie-breaking (ties are the rule for m = 1, where
    // the score carries no angle information at all).
    int best = 0, ties = 1;
    for (int i = 1; i < n_theta; ++i) {
      if (score(i) > score(best)) {
        best = i;
        ties = 1;
      } else if (score(i) == score(best)) {
        ++ties;
        if (rng.uniform_index(static_cast<std::uint64_t>(ties)) == 0) best = i;
      }
    }
    const double err = theta(best) * theta(best);
    sum += err;
    sum2 += err * err;
  }
  DeltaEstimate est;
  est.value = sum / mc_trials;
  const double var = (sum2 - sum * sum / mc_trials) / (mc_trials - 1.0);
  est.std_error = var > 0.0 ? std::sqrt(var / mc_trials) : 0.0;
  return est;
}

DeltaEstimate delta_achievable(const AchievabilityConfig& cfg, std::uint64_t seed) {
  // Clamped bound table as weights; the slack below a total of 1 is assigned
  // to the no-error cell, a surplus is normalized away.
  std::vector<std::pair<double, std::pair<int, int>>> cells;
  const std::vector<double> lc_s = log_choose_vector(cfg.b_s, cfg.a_s);
  const std::vector<double> lc_c = log_choose_vector(cfg.b_c, cfg.a_c);
  const double nm = static_cast<double>(cfg.n) * cfg.m;
  double off_mass = 0.0;
  for (int k_s = 0; k_s <= cfg.a_s; ++k_s)
    for (int k_c = 0; k_c <= cfg.a_c; ++k_c) {
      if (k_s == 0 && k_c == 0) continue;
      const double lp = lc_s[k_s] + lc_c[k_c] -
                        nm * std::log1p(0.25 * (k_c * cfg.pp_c + k_s * cfg.pp_s) / cfg.sigma_z2);
      const double p = std::exp(std::min(0.0, lp));
      off_mass += p;
      if (p > 0.0) cells.push_back({p, {k_s, k_c}});
    }
  const double scale = off_mass < 1.0 ? 1.0 : 1.0 / off_mass;
  for (auto& cell : cells) cell.first *= scale;
  cells.push_back({off_mass < 1.0 ? 1.0 - off_mass : 0.0, {0, 0}});
  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  DeltaEstimate out;
  double var_acc = 0.0;
  double covered = 0.0;
  int evaluated = 0;
  for (const auto& [w, ks_kc] : cells) {
    // Tail cells are charged the worst case (wrapped squared error <= 1)
    // instead of their own Monte Carlo run; the runtime cap only matters far
    // below the operating point, where the table is nearly flat.
    if (1.0 - covered < 1e-6 || evaluated >= 2000) {
      out.value += 1.0 - covered;
      break;
    }
    covered += w;
    ++evaluated;
    const double sigma_s2 =
        ks_kc.second * cfg.pp_c + ks_kc.first * cfg.pp_s + cfg.sigma_z2;
    const double v = sigma_s2 / (static_cast<double>(cfg.n) * cfg.pp_s);
    const std::uint64_t cell_seed =
        splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(ks_kc.first) * 65536 +
                                                    static_cast<std::uint64_t>(ks_kc.second) + 1)));
    const DeltaEstimate cell = delta_mc(v, cfg.m, cfg.n_theta, cfg.mc_trials, cell_seed);
    out.value += w * cell.value;
    var_acc += w * w * cell.std_error * cell.std_error;
  }
  out.std_error = std::sqrt(var_acc);
  return out;
}

AchievabilityReport evaluate_achievability(const AchievabilityConfig& cfg, std::uint64_t seed) {
  AchievabilityReport rep;
  rep.p_cons = p_cons(cfg).value;
  rep.p_coll = p_coll_bound(cfg).value;
  rep.p_md = p_md_bound(cfg).value;
  rep.epsilon = std::min(1.0, rep.p_cons + rep.p_coll + rep.p_md);
  rep.delta = delta_achievable(cfg, seed);
  return rep;
}

BsSelection select_bs(const AchievabilityConfig& cfg, double eps_target, int cap) {
  if (!(eps_target > 0.0)) throw ValidationError("select_bs: eps_target must be positive");
  AchievabilityConfig c = cfg;
  if (cfg.a_s <= 1 && cfg.a_c <= 1) return {cap, true};  // collision identically zero
  for (int b = 1; b <= cap; ++b) {
    c.b_s = b;
    if (p_coll_bound(c).value < 0.5 * eps_target) return {b, false};
  }
  throw BracketError("select_bs: no width up to the cap keeps collisions below half the target");
}

double bound_per_user_energy(const AchievabilityConfig& cfg) {
  const int total_users = cfg.a_c + cfg.a_s;
  if (total_users == 0) throw std::domain_error("bound_per_user_energy: no users");
  return (cfg.pbar_c * cfg.a_c + cfg.pbar_s * cfg.a_s) * cfg.n / (total_users * cfg.sigma_z2);
}

namespace {

// Headroom rule: caps sized so the power-violation term stays below one
// percent of the PUPE budget.
void apply_headroom(AchievabilityConfig& c, double eps_target) {
  const int total_users = std::max(1, c.a_c + c.a_s);
  const double per_user_tail = 0.01 * eps_target / total_users;
  const int dof = 2 * c.n;
  const double factor = chi_squared_inverse(dof, 1.0 - per_user_tail) / dof;
  c.pbar_c = c.pp_c * factor;
  c.pbar_s = c.pp_s * factor;
}

}  // namespace

RequiredEnergy required_ebn0_achievable(AchievabilityConfig cfg, double eps_target,
                                        double delta_target, std::uint64_t seed) {
  if (!(eps_target > 0.0 && eps_target <= 1.0) || !(delta_target > 0.0))
    throw ValidationError("required_ebn0_achievable: bad targets");
  const double base_pc = cfg.pp_c, base_ps = cfg.pp_s;
  auto configure = [&](double scale_db) {
    AchievabilityConfig c = cfg;
    const double s = std::pow(10.0, scale_db / 10.0);
    c.pp_c = base_pc * s;
    c.pp_s = base_ps * s;
    apply_headroom(c, eps_target);
    return c;
  };
  auto meets = [&](double scale_db) {
    const AchievabilityConfig c = configure(scale_db);
    const double eps =
        std::min(1.0, p_cons(c).value + p_coll_bound(c).value + p_md_bound(c).value);
    if (eps > eps_target) return false;  // skip the Monte Carlo when already failed
    return delta_achievable(c, seed).value <= delta_target;
  };
  double lo = -10.0, hi = 60.0;
  if (!meets(hi))
    throw BracketError("required_ebn0_achievable: targets unreachable within the power bracket");
  if (!meets(lo)) {
    while (hi - lo > 0.1) {
      const double mid = 0.5 * (lo + hi);
      (meets(mid) ? hi : lo) = mid;
    }
  } else {
    hi = lo;  // vacuous constraints
  }
  RequiredEnergy out;
  out.power_scale = std::pow(10.0, hi / 10.0);
  out.ebn0_db = 10.0 * std::log10(bound_per_user_energy(configure(hi)));
  return out;
}

}  // namespace unisac
