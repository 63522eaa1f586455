#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "unisac/baselines.hpp"
#include "unisac/bounds.hpp"
#include "unisac/harness.hpp"
#include "unisac/numerics.hpp"
#include "unisac/polar.hpp"
#include "unisac/rng.hpp"

namespace {

using namespace unisac;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::int64_t trials = 0;
  bool trials_set = false;
  std::string out;
  int workers = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (flat key=value)");
  cmd->add_option("--seed", args.seed, "master RNG seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--trials", args.trials, "Monte Carlo trial count")
      ->each([&](const std::string&) { args.trials_set = true; });
  cmd->add_option("--out", args.out, "output file path");
  cmd->add_option("--workers", args.workers, "worker thread count")->check(CLI::PositiveNumber);
}

SystemConfig resolve_config(const CommonArgs& args) {
  SystemConfig cfg;
  if (!args.config_path.empty()) cfg = load_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  if (args.trials_set) cfg.trials = static_cast<int>(args.trials);
  cfg.validate();
  return cfg;
}

void print_metrics(const AggregateMetrics& m) {
  std::cout << "trials " << m.trials << "\n";
  std::cout << "pupe " << m.pupe << " (se " << m.pupe_se << ")\n";
  std::cout << "p_md " << m.p_md << "\n";
  std::cout << "p_coll " << m.p_coll << "\n";
  if (m.mseaoa_defined)
    std::cout << "mseaoa " << m.mseaoa << " (se " << m.mseaoa_se << ")\n";
  else
    std::cout << "mseaoa undefined (no scored sensing users)\n";
}

void write_metrics_csv(const AggregateMetrics& m, const SystemConfig& cfg,
                       const std::string& path) {
  SweepResult r;
  r.figure = "simulate";
  r.value_name = "pupe";
  r.config_hash = config_hash(cfg);
  r.points.push_back({0.0, "pupe", m.pupe, m.pupe_se, m.trials, cfg.seed});
  if (m.mseaoa_defined)
    r.points.push_back({0.0, "mseaoa", m.mseaoa, m.mseaoa_se, m.trials, cfg.seed});
  export_sweep(r, path, ExportFormat::csv);
}

int cmd_simulate(const CommonArgs& args, const std::string& model_name) {
  const SystemConfig cfg = resolve_config(args);
  const SimModel model = parse_sim_model(model_name);
  const AggregateMetrics m = run_trials(cfg, model, cfg.trials, cfg.seed, args.workers);
  print_metrics(m);
  if (!args.out.empty()) write_metrics_csv(m, cfg, args.out);
  return 0;
}

int cmd_bound(const CommonArgs& args) {
  const SystemConfig cfg = resolve_config(args);
  const AchievabilityReport rep = evaluate_achievability(cfg.ach, cfg.seed);
  std::cout << "p_cons " << rep.p_cons << "\n";
  std::cout << "p_coll " << rep.p_coll << "\n";
  std::cout << "p_md " << rep.p_md << "\n";
  std::cout << "epsilon " << rep.epsilon << "\n";
  std::cout << "delta " << rep.delta.value << " (se " << rep.delta.std_error << ")\n";
  const RequiredEnergy req =
      required_ebn0_achievable(cfg.ach, cfg.eps_target, cfg.delta_target, cfg.seed);
  std::cout << "required_ebn0_db " << req.ebn0_db << "\n";
  std::cout << "power_scale " << req.power_scale << "\n";
  return 0;
}

int cmd_baseline(const CommonArgs& args, const std::string& kind_name) {
  const SystemConfig cfg = resolve_config(args);
  const BaselineKind kind = parse_baseline_kind(kind_name);
  const BaselineTargets targets{cfg.eps_target, cfg.delta_target};
  if (kind == BaselineKind::tin_practical) {
    const AggregateMetrics m =
        run_trials(cfg, SimModel::tin_practical, cfg.trials, cfg.seed, args.workers);
    print_metrics(m);
    if (!args.out.empty()) write_metrics_csv(m, cfg, args.out);
    return 0;
  }
  const BaselineReport rep = evaluate_ideal_model(kind, cfg.ach, targets, cfg.seed);
  if (!rep.feasible) {
    std::cout << "feasible 0 (" << rep.reason << ")\n";
    return 3;
  }
  std::cout << "feasible 1\n";
  std::cout << "pupe " << rep.pupe.value << "\n";
  std::cout << "mseaoa " << rep.mseaoa << "\n";
  std::cout << "energy_db " << 10.0 * std::log10(rep.energy) << "\n";
  const RequiredEnergy req = required_ebn0_ideal(kind, cfg.ach, targets, cfg.seed);
  std::cout << "required_ebn0_db " << req.ebn0_db << "\n";
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& figure, const std::string& scale,
              const std::string& format) {
  if (scale != "desk") throw ValidationError("sweep: only --scale=desk is available");
  const std::uint64_t seed = args.seed_set ? args.seed : 1;
  const SweepResult r = reproduce_figure(figure, SweepScale::desk, seed, args.workers);
  const std::string path = args.out.empty() ? "sweep_" + figure + ".csv" : args.out;
  export_sweep(r, path, format == "plotdata" ? ExportFormat::plotdata : ExportFormat::csv);
  std::cout << "wrote " << r.points.size() << " points to " << path << "\n";
  return 0;
}

bool check(const char* name, bool ok) {
  std::cout << (ok ? "pass " : "FAIL ") << name << "\n";
  return ok;
}

int cmd_selftest() {
  bool ok = true;
  {
    RngStream rng(7);
    ComplexMatrix a(3, 32);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i / 32, i % 32) = rng.complex_gaussian(1.0);
    ComplexMatrix y(2, 32);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i / 32, i % 32) = rng.complex_gaussian(1.0);
    const ComplexMatrix r1 = project_residual(y, a);
    const ComplexMatrix r2 = project_residual(r1, a);
    ok &= check("projection idempotent", (r1 - r2).norm() < 1e-9);
    ok &= check("projection orthogonal", (r1 * a.adjoint()).norm() < 1e-9);
  }
  {
    const ComplexVector b1 = steering_vector(0.37, 6);
    const ComplexVector b2 = steering_vector(0.37 + 2.0, 6);
    ok &= check("steering periodicity", (b1 - b2).norm() < 1e-12);
    const ComplexVector b0 = steering_vector(0.0, 6);
    const double inner = (b0.adjoint() * steering_vector(0.37, 6))(0).real();
    ok &= check("beam kernel inner product", std::abs(inner - f_e_kernel(0.37, 6)) < 1e-12);
  }
  {
    const PolarCodeSpec codec = construct_code(64, 20);
    RngStream rng(9);
    BitVector info(20);
    for (auto& b : info) b = rng.bit() ? 1 : 0;
    const BitVector cw = polar_encode(info, codec);
    std::vector<double> llr(64);
    for (int i = 0; i < 64; ++i) llr[static_cast<std::size_t>(i)] = cw[static_cast<std::size_t>(i)] ? -8.0 : 8.0;
    const CrcSpec none{1, 0x1};
    const PolarCodeSpec codec2 = construct_code(64, 21);
    BitVector frame = crc_attach(info, none);
    const BitVector cw2 = polar_encode(frame, codec2);
    std::vector<double> llr2(64);
    for (int i = 0; i < 64; ++i) llr2[static_cast<std::size_t>(i)] = cw2[static_cast<std::size_t>(i)] ? -8.0 : 8.0;
    const auto dec = scl_decode(llr2, codec2, none, 4);
    ok &= check("polar round trip", dec.has_value() && BitVector(dec->begin(), dec->end() - 1) == info);
  }
  {
    const CrcSpec crc{16, 0x1021};
    BitVector msg(40, 0);
    msg[3] = 1;
    BitVector frame = crc_attach(msg, crc);
    ok &= check("crc accepts", crc_check(frame, crc));
    frame[11] ^= 1;
    ok &= check("crc rejects flip", !crc_check(frame, crc));
  }
  {
    const double q = gaussian_tail(1.0);
    ok &= check("gaussian tail", std::abs(q - 0.15865525393145705) < 1e-10);
    ok &= check("chi squared median", std::abs(chi_squared_cdf(2, 2.0 * std::log(2.0)) - 0.5) < 1e-10);
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsourced integrated sensing and communications laboratory"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string model_name = "unisac_practical";
  std::string kind_name;
  std::string figure;
  std::string scale = "desk";
  std::string format = "csv";

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo run of a practical receiver");
  add_common(simulate, args);
  simulate->add_option("--model", model_name, "unisac_practical or tin_practical");

  CLI::App* bound = app.add_subcommand("bound", "evaluate the achievable bound");
  add_common(bound, args);

  CLI::App* baseline = app.add_subcommand("baseline", "evaluate a benchmark model");
  add_common(baseline, args);
  baseline->add_option("--kind", kind_name, "benchmark model name")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "reproduce a survey sweep");
  add_common(sweep, args);
  sweep->add_option("--figure", figure, "fig3, fig4, fig5 or fig6")->required();
  sweep->add_option("--scale", scale, "sweep scale (desk)");
  sweep->add_option("--format", format, "csv or plotdata");

  app.add_subcommand("selftest", "fast invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("simulate")) return cmd_simulate(args, model_name);
    if (app.got_subcommand("bound")) return cmd_bound(args);
    if (app.got_subcommand("baseline")) return cmd_baseline(args, kind_name);
    if (app.got_subcommand("sweep")) return cmd_sweep(args, figure, scale, format);
    if (app.got_subcommand("selftest")) return cmd_selftest();
  } catch (const BracketError& e) {
    std::cerr << "target unreachable: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const ShapeError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
