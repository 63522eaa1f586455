#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>

#include "doctest.h"
#include "unisac/config.hpp"
#include "unisac/numerics.hpp"
#include "unisac/tx.hpp"

using namespace unisac;

namespace {

SystemConfig small_config() {
  SystemConfig cfg;
  cfg.ach.n = 64;
  cfg.ach.m = 3;
  cfg.ach.a_c = 2;
  cfg.ach.a_s = 2;
  cfg.ach.b_c = 20;
  cfg.ach.b_s = 3;
  cfg.s_c = 1;
  cfg.s_s = 2;
  return cfg;
}

}  // namespace

TEST_CASE("frame layout divisibility") {
  FrameLayout l = FrameLayout::make(1024, 4, 2);
  CHECK(l.n_c() == 256);
  CHECK(l.n_s() == 512);
  CHECK_THROWS_AS(FrameLayout::make(1024, 3, 1), ValidationError);
  CHECK_THROWS_AS(FrameLayout::make(1024, 1, 5), ValidationError);
  CHECK_THROWS_AS(FrameLayout::make(0, 1, 1), ValidationError);
}

TEST_CASE("codebook rows have exact energy and differ per seed") {
  FrameLayout l = FrameLayout::make(256, 1, 2);
  const double p_s = 2.3;
  RngStream rng(42);
  SensingCodebook cb = build_sensing_codebook(4, l, p_s, rng);
  REQUIRE(cb.row_count() == 16);
  REQUIRE(cb.a.cols() == 128);
  for (Eigen::Index r = 0; r < cb.row_count(); ++r)
    CHECK(cb.row(r).squaredNorm() == doctest::Approx(p_s * 128).epsilon(1e-12));
  RngStream rng2(43);
  SensingCodebook cb2 = build_sensing_codebook(4, l, p_s, rng2);
  CHECK((cb.row(0) - cb2.row(0)).cwiseAbs().maxCoeff() > 1e-3);
  RngStream rng3(42);
  SensingCodebook cb3 = build_sensing_codebook(4, l, p_s, rng3);
  CHECK((cb.row(0) - cb3.row(0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("codebook rejects sizes beyond the in-memory cap") {
  FrameLayout l = FrameLayout::make(64, 1, 1);
  RngStream rng(1);
  CHECK_THROWS_AS(build_sensing_codebook(25, l, 1.0, rng), CapacityError);
  CHECK_THROWS_AS(build_sensing_codebook(0, l, 1.0, rng), ValidationError);
}

TEST_CASE("cross correlation of distinct rows matches the gaussian magnitude law") {
  // For unit-variance entries, <a_i, a_j> is approximately sqrt(n_s) P times a
  // standard complex gaussian, whose magnitude has mean sqrt(pi)/2. So the
  // normalized magnitude has mean sqrt(pi/4)/sqrt(n_s).
  FrameLayout l = FrameLayout::make(128, 1, 1);
  const int n_s = 128;
  RngStream rng(7);
  double acc = 0.0;
  int pairs = 0;
  while (pairs < 10000) {
    SensingCodebook cb = build_sensing_codebook(6, l, 1.0, rng);
    for (int i = 0; i + 1 < cb.row_count() && pairs < 10000; i += 2, ++pairs)
      acc += std::abs(cb.row(i).dot(cb.row(i + 1))) / static_cast<double>(n_s);
  }
  const double mean = acc / 10000.0;
  const double expect = std::sqrt(M_PI / 4.0) / std::sqrt(static_cast<double>(n_s));
  // Magnitude std dev is about 0.46/sqrt(n_s); 5 sigma over 1e4 samples.
  CHECK(mean == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("communication user slotting energy and determinism") {
  FrameLayout l = FrameLayout::make(256, 2, 1);
  CrcSpec crc;
  PolarCodeSpec codec = construct_code(128, 40 + crc.r);
  BitVector msg(40, 1);
  const double p_c = 1.7;
  TxRecord rec = encode_comm_user(msg, l, codec, crc, p_c, 1);
  REQUIRE(rec.frame.size() == 256);
  CHECK(rec.frame.head(128).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 128; i < 256; ++i) CHECK(std::abs(rec.frame(i)) == doctest::Approx(std::sqrt(p_c)));
  CHECK(rec.frame.squaredNorm() == doctest::Approx(128 * p_c).epsilon(1e-12));
  TxRecord rec2 = encode_comm_user(msg, l, codec, crc, p_c, 1);
  CHECK((rec.frame - rec2.frame).cwiseAbs().maxCoeff() == 0.0);  // same message, same signal
  CHECK_THROWS_AS(encode_comm_user(msg, l, codec, crc, p_c, 2), std::domain_error);
  CHECK_THROWS_AS(encode_comm_user(BitVector(39, 0), l, codec, crc, p_c, 0), ShapeError);
}

TEST_CASE("sensing user slotting and energy") {
  FrameLayout l = FrameLayout::make(256, 1, 4);
  RngStream rng(9);
  SensingCodebook cb = build_sensing_codebook(3, l, 0.8, rng);
  TxRecord rec = encode_sensing_user(cb, l, 5, 2);
  REQUIRE(rec.frame.size() == 256);
  CHECK(rec.frame.head(128).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rec.frame.tail(64).cwiseAbs().maxCoeff() == 0.0);
  CHECK(rec.frame.squaredNorm() == doctest::Approx(0.8 * 64).epsilon(1e-12));
  CHECK_THROWS_AS(encode_sensing_user(cb, l, 8, 0), std::domain_error);
  CHECK_THROWS_AS(encode_sensing_user(cb, l, 0, 4), std::domain_error);
}

TEST_CASE("scenario assembly empty and deterministic") {
  SystemConfig cfg = small_config();
  CrcSpec crc;
  PolarCodeSpec codec = construct_code(cfg.n_c(), cfg.ach.b_c + crc.r);
  FrameLayout l = FrameLayout::make(cfg.ach.n, cfg.s_c, cfg.s_s);
  RngStream crng(3);
  SensingCodebook cb = build_sensing_codebook(cfg.ach.b_s, l, cfg.ach.pbar_s, crng);

  SystemConfig empty = cfg;
  empty.ach.a_c = 0;
  empty.ach.a_s = 0;
  RngStream r0(5);
  CHECK(assemble_scenario(empty, cb, codec, crc, r0).users.empty());

  RngStream r1(5), r2(5);
  Scenario a = assemble_scenario(cfg, cb, codec, crc, r1);
  Scenario b = assemble_scenario(cfg, cb, codec, crc, r2);
  REQUIRE(a.users.size() == 4);
  for (size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].aoa.theta == b.users[i].aoa.theta);
    CHECK((a.users[i].signal - b.users[i].signal).cwiseAbs().maxCoeff() == 0.0);
  }
  // Every frame is supported on exactly one slot of its kind.
  for (const auto& rec : a.records) {
    int width = rec.role == UserRole::communication ? l.n_c() : l.n_s();
    int start = rec.slot * width;
    double inside = rec.frame.segment(start, width).squaredNorm();
    CHECK(inside == doctest::Approx(rec.frame.squaredNorm()).epsilon(1e-12));
    CHECK(inside > 0.0);
  }
}

TEST_CASE("sensing draws are uniform over row and slot pairs") {
  SystemConfig cfg = small_config();
  cfg.ach.a_c = 0;
  cfg.ach.a_s = 1;
  cfg.ach.b_s = 2;
  CrcSpec crc;
  PolarCodeSpec codec = construct_code(cfg.n_c(), cfg.ach.b_c + crc.r);
  FrameLayout l = FrameLayout::make(cfg.ach.n, cfg.s_c, cfg.s_s);
  RngStream crng(3);
  SensingCodebook cb = build_sensing_codebook(cfg.ach.b_s, l, 1.0, crng);
  std::map<std::pair<int, int>, int> counts;
  const int draws = 100000;
  RngStream rng(17);
  for (int t = 0; t < draws; ++t) {
    Scenario sc = assemble_scenario(cfg, cb, codec, crc, rng);
    ++counts[{sc.truth.sens[0].row, sc.truth.sens[0].slot}];
  }
  const int cells = 4 * 2;
  const double expect = static_cast<double>(draws) / cells;
  double chi2 = 0.0;
  for (const auto& [key, c] : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(counts.size() == cells);
  // Critical value of chi-squared with 7 dof at the 1e-3 level.
  CHECK(chi2 < chi_squared_inverse(cells - 1, 1.0 - 1e-3));
}

TEST_CASE("two sensing users with one codeword bit collide half the time") {
  SystemConfig cfg = small_config();
  cfg.ach.a_c = 0;
  cfg.ach.a_s = 2;
  cfg.ach.b_s = 1;
  cfg.s_s = 1;
  CrcSpec crc;
  PolarCodeSpec codec = construct_code(cfg.n_c(), cfg.ach.b_c + crc.r);
  FrameLayout l = FrameLayout::make(cfg.ach.n, cfg.s_c, cfg.s_s);
  RngStream crng(3);
  SensingCodebook cb = build_sensing_codebook(1, l, 1.0, crng);
  int collisions = 0;
  const int draws = 100000;
  RngStream rng(23);
  for (int t = 0; t < draws; ++t) {
    Scenario sc = assemble_scenario(cfg, cb, codec, crc, rng);
    if (sc.truth.sens[0].row == sc.truth.sens[1].row) ++collisions;
  }
  double freq = static_cast<double>(collisions) / draws;
  CHECK(freq == doctest::Approx(0.5).epsilon(0.02));  // 5 sigma ~ 0.008 absolute
}

TEST_CASE("config parse serialize round trip and failures") {
  SystemConfig cfg = small_config();
  cfg.seed = 987654321012345ULL;
  cfg.ach.sigma_z2 = 0.037;
  std::string text = serialize_config(cfg);
  SystemConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(config_hash(back) == config_hash(cfg));
  SystemConfig other = cfg;
  other.ach.a_c = 3;
  CHECK(config_hash(other) != config_hash(cfg));

  CHECK_THROWS_AS(parse_config("bogus_key = 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("n\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("n = frog\n"), ValidationError);
  // Comments and blank lines are fine.
  SystemConfig commented = parse_config("# header\n\nseed = 5 # trailing\n" + text);
  CHECK(commented.seed == cfg.seed);  // later assignment wins

  SystemConfig bad = cfg;
  bad.s_c = 3;  // does not divide n=64
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.ach.pbar_c = 0.5 * bad.ach.pp_c;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = cfg;
  bad.n_s_grid = 64;  // must be odd
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}
