#include <doctest.h>

#include <cmath>

#include "d2dsim/metrics.hpp"

using namespace d2dsim;
using doctest::Approx;

TEST_CASE("pair throughput") {
  CHECK(pair_throughput(0.0, 3, 180e3) == 0.0);
  CHECK(pair_throughput(1.0, 1, 180e3) == 180e3);
  CHECK(pair_throughput(3.0, 4, 180e3) == 4 * 2 * 180e3);
  CHECK_THROWS_AS(pair_throughput(1.0, 0, 180e3), ContractViolation);

  const std::vector<double> rbs{1.0, 3.0, 7.0};
  CHECK(throughput_from_rb_sinrs(rbs, 1.0) == 1.0 + 2.0 + 3.0);
}

TEST_CASE("even power split: more RBs give more throughput") {
  for (double snr : {1e-3, 0.1, 1.0, 10.0, 1e3, 1e6}) {
    CAPTURE(snr);
    double prev = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const double t = pair_throughput(snr / k, k, 180e3);
      CHECK(t > prev);
      prev = t;
    }
  }
}

TEST_CASE("application priority orders throughput") {
  // Same channel and interference: A1 (5 RBs) > A2 (3) > A3 (1).
  const double snr = 200.0;
  const double a1 = pair_throughput(snr / 5, 5, 180e3);
  const double a2 = pair_throughput(snr / 3, 3, 180e3);
  const double a3 = pair_throughput(snr / 1, 1, 180e3);
  CHECK(a1 > a2);
  CHECK(a2 > a3);
}

TEST_CASE("MOS mapping") {
  CHECK(mos(0.0) == Approx(0.85632165023231623).epsilon(1e-14));
  CHECK(mos(563.4) == Approx(4.0000406692312238).epsilon(1e-14));
  CHECK(mos(1e6) < 5.0);
  CHECK(5.0 - mos(1e6) < 1e-3);
  CHECK_THROWS_AS(mos(-1.0), std::domain_error);

  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform() * 1e5;
    const double b = a + 1e-3 + rng.uniform() * 100.0;
    CHECK(mos(a) < mos(b));
    CHECK(mos(a) > 0.85);
    CHECK(mos(a) < 5.0);
  }
}

TEST_CASE("kbps conversion point") {
  CHECK(to_kbps(563400.0) == 563.4);
  CHECK(mos(to_kbps(563400.0)) == mos(563.4));
}

TEST_CASE("aggregate throughput over a lending history") {
  const double beta = 180e3;
  SUBCASE("single event") {
    const std::vector<ShareEvent> h{{1, 15.0, 2, true}};
    CHECK(aggregate_throughput(h, beta).total_bps == pair_throughput(15.0, 2, beta));
  }
  SUBCASE("two consecutive reuses add up") {
    const std::vector<ShareEvent> h{{1, 15.0, 2, true}, {2, 3.0, 1, true}};
    const auto agg = aggregate_throughput(h, beta);
    CHECK(agg.total_bps == pair_throughput(15.0, 2, beta) + pair_throughput(3.0, 1, beta));
    CHECK_FALSE(agg.broken);
  }
  SUBCASE("a skipped iteration restarts the chain") {
    const std::vector<ShareEvent> h{{1, 15.0, 2, true}, {3, 3.0, 1, true}};
    const auto agg = aggregate_throughput(h, beta);
    CHECK(agg.total_bps == pair_throughput(3.0, 1, beta));
    CHECK(agg.broken);
    CHECK(agg.chain_start == 1);
  }
  SUBCASE("an ineligible share restarts the chain") {
    const std::vector<ShareEvent> h{{1, 15.0, 2, true}, {2, 3.0, 1, false}, {3, 7.0, 1, true}};
    const auto agg = aggregate_throughput(h, beta);
    CHECK(agg.total_bps == pair_throughput(3.0, 1, beta) + pair_throughput(7.0, 1, beta));
    CHECK(agg.chain_start == 1);
  }
  SUBCASE("random histories match a brute-force triple sum") {
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
      std::vector<ShareEvent> h;
      for (int n = 1; n <= 3; ++n) {
        const int shares = 1 + static_cast<int>(rng.below(2));
        for (int s = 0; s < shares; ++s) {
          h.push_back({n, rng.uniform() * 1e3, 1 + static_cast<int>(rng.below(5)), true});
        }
      }
      double oracle = 0.0;
      for (const auto& e : h) {
        for (int k = 0; k < e.k; ++k) oracle += beta * std::log2(1.0 + e.sinr_linear);
      }
      CHECK(aggregate_throughput(h, beta).total_bps == Approx(oracle).epsilon(1e-14));
    }
  }
  SUBCASE("out of order history is rejected") {
    const std::vector<ShareEvent> h{{2, 1.0, 1, true}, {1, 1.0, 1, true}};
    CHECK_THROWS_AS(aggregate_throughput(h, beta), ContractViolation);
  }
}

TEST_CASE("complexity metric and T_system") {
  CHECK(complexity_metric({}) == 0.0);
  const std::vector<InterferenceBreakdown> b{InterferenceBreakdown::of(1, 2, 3),
                                              InterferenceBreakdown::of(0.5, 0, 0)};
  CHECK(complexity_metric(b) == 6.5);

  std::vector<IterationResult> its(3);
  its[0].iteration_total_bps = 1e6;
  its[1].iteration_total_bps = 2e6;
  its[2].iteration_total_bps = 4.5e6;
  CHECK(t_system(its) == (1e6 + 2e6 + 4.5e6) / 3.0);
  CHECK(t_system(std::span(its).first(1)) == 1e6);
  CHECK_THROWS_AS(t_system({}), ContractViolation);
}

TEST_CASE("mode names round trip") {
  CHECK(parse_mode(to_string(AllocationMode::Sbrra)) == AllocationMode::Sbrra);
  CHECK(parse_mode(to_string(AllocationMode::Hmm)) == AllocationMode::Hmm);
  CHECK_THROWS_AS(parse_mode("greedy"), std::invalid_argument);
}
