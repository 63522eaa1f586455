#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "unisac/harness.hpp"
#include "unisac/types.hpp"

using namespace unisac;

namespace {

SystemConfig small_config() {
  SystemConfig cfg;
  cfg.ach.n = 256;
  cfg.ach.m = 4;
  cfg.ach.a_c = 2;
  cfg.ach.a_s = 2;
  cfg.ach.b_c = 30;
  cfg.ach.b_s = 6;
  cfg.ach.pp_c = cfg.ach.pbar_c = 0.2;
  cfg.ach.pp_s = cfg.ach.pbar_s = 0.2;
  cfg.ach.sigma_z2 = 1.0;
  cfg.q_grid = 64;
  cfg.list_size = 8;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("same seed gives identical aggregates") {
  const SystemConfig cfg = small_config();
  const AggregateMetrics a = run_trials(cfg, SimModel::unisac_practical, 40, 11);
  const AggregateMetrics b = run_trials(cfg, SimModel::unisac_practical, 40, 11);
  CHECK(a.pupe == b.pupe);
  CHECK(a.mseaoa == b.mseaoa);
  CHECK(a.pupe_se == b.pupe_se);
}

TEST_CASE("worker count does not change the result") {
  const SystemConfig cfg = small_config();
  const AggregateMetrics a = run_trials(cfg, SimModel::unisac_practical, 40, 11, 1);
  const AggregateMetrics b = run_trials(cfg, SimModel::unisac_practical, 40, 11, 3);
  CHECK(a.pupe == b.pupe);
  CHECK(a.mseaoa == b.mseaoa);
}

TEST_CASE("near-noiseless single user is recovered") {
  SystemConfig cfg = small_config();
  cfg.ach.a_c = 1;
  cfg.ach.a_s = 1;
  cfg.ach.sigma_z2 = 1e-9;
  const AggregateMetrics m = run_trials(cfg, SimModel::unisac_practical, 5, 3);
  CHECK(m.pupe == 0.0);
  CHECK(m.mseaoa < 1e-4);
}

TEST_CASE("seed changes move the estimate within sampling error") {
  SystemConfig cfg = small_config();
  cfg.ach.pp_c = cfg.ach.pbar_c = 0.05;
  cfg.ach.pp_s = cfg.ach.pbar_s = 0.05;
  const AggregateMetrics a = run_trials(cfg, SimModel::unisac_practical, 150, 21);
  const AggregateMetrics b = run_trials(cfg, SimModel::unisac_practical, 150, 22);
  const double se = std::hypot(a.pupe_se, b.pupe_se) + 0.02;
  CHECK(std::abs(a.pupe - b.pupe) < 4.0 * se);
}

TEST_CASE("tin receiver model runs through the harness") {
  const SystemConfig cfg = small_config();
  const AggregateMetrics m = run_trials(cfg, SimModel::tin_practical, 20, 5);
  CHECK(m.trials == 20);
  CHECK(m.pupe >= 0.0);
  CHECK(m.pupe <= 1.0);
}

TEST_CASE("vacuous targets stop at the bottom of the power range") {
  SystemConfig cfg = small_config();
  cfg.eps_target = 1.0;
  cfg.delta_target = 1e9;
  const RequiredEnergy e = required_ebn0_practical(cfg, SimModel::unisac_practical, 10, 3);
  CHECK(e.power_scale == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("model name parsing") {
  CHECK(parse_sim_model("unisac_practical") == SimModel::unisac_practical);
  CHECK(parse_sim_model("tin_practical") == SimModel::tin_practical);
  CHECK_THROWS_AS(parse_sim_model("bogus"), ValidationError);
  CHECK_THROWS_AS(run_trials(small_config(), SimModel::unisac_practical, 0, 1), ValidationError);
}

TEST_CASE("csv export and import round trip exactly") {
  SweepResult r;
  r.figure = "fig4";
  r.value_name = "ebn0_db";
  r.config_hash = 0xdeadbeef12345678ULL;
  r.points.push_back({20.0, "unisac_practical", 16.672000000000001, 0.125, 200, 7});
  r.points.push_back({80.0, "unisac_achievable", 21.0 / 7.0, 0.0, 0, 7});
  const std::string path = "round_trip_sweep.csv";
  export_sweep(r, path, ExportFormat::csv);
  const SweepResult back = import_sweep_csv(path);
  std::remove(path.c_str());
  REQUIRE(back.points.size() == r.points.size());
  CHECK(back.value_name == r.value_name);
  CHECK(back.config_hash == r.config_hash);
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    CHECK(back.points[i].x == r.points[i].x);
    CHECK(back.points[i].model == r.points[i].model);
    CHECK(back.points[i].value == r.points[i].value);
    CHECK(back.points[i].std_error == r.points[i].std_error);
    CHECK(back.points[i].trials == r.points[i].trials);
    CHECK(back.points[i].seed == r.points[i].seed);
  }
}

TEST_CASE("csv header and column order are stable") {
  SweepResult r;
  r.figure = "fig5";
  r.value_name = "mseaoa";
  r.config_hash = 1;
  r.points.push_back({2.0, "practical_15db", 0.5, 0.25, 1000, 7});
  const std::string path = "header_sweep.csv";
  export_sweep(r, path, ExportFormat::csv);
  const std::string text = slurp(path);
  std::remove(path.c_str());
  CHECK(text.substr(0, text.find('\n')) == "x,model,mseaoa,stderr,trials,seed,config_hash");
  CHECK(text.find("2,practical_15db,0.5,0.25,1000,7,0000000000000001") != std::string::npos);
}

TEST_CASE("empty sweep exports a bare header") {
  SweepResult r;
  r.figure = "fig3";
  r.value_name = "ebn0_db";
  const std::string path = "empty_sweep.csv";
  export_sweep(r, path, ExportFormat::csv);
  const std::string text = slurp(path);
  std::remove(path.c_str());
  CHECK(text == "x,model,ebn0_db,stderr,trials,seed,config_hash\n");
}

TEST_CASE("plot-data export groups points by model") {
  SweepResult r;
  r.figure = "fig6";
  r.value_name = "ebn0_db";
  r.points.push_back({1.0, "comm_slots", 10.0, 0.0, 200, 7});
  r.points.push_back({2.0, "comm_slots", 11.0, 0.0, 200, 7});
  r.points.push_back({1.0, "sensing_slots", 10.0, 0.0, 200, 7});
  const std::string path = "plot_sweep.dat";
  export_sweep(r, path, ExportFormat::plotdata);
  const std::string text = slurp(path);
  std::remove(path.c_str());
  CHECK(text.find("# figure fig6") != std::string::npos);
  CHECK(text.find("# model comm_slots") != std::string::npos);
  CHECK(text.find("# model sensing_slots") != std::string::npos);
  CHECK(text.find("comm_slots") < text.find("sensing_slots"));
}

TEST_CASE("imports reject a mangled header") {
  const std::string path = "bad_sweep.csv";
  {
    std::ofstream out(path);
    out << "x,model,value,oops\n";
  }
  CHECK_THROWS_AS(import_sweep_csv(path), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("figure names are validated") {
  CHECK_THROWS_AS(reproduce_figure("fig9", SweepScale::desk, 1), ValidationError);
}
