#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "fdmac/pairing.hpp"

using namespace fdmac;

namespace {

LinkState random_link(int clients, std::uint64_t seed, double sic = 110.0) {
  const Topology t = generate_topology(clients, 100.0, seed);
  Rng rng = make_rng(seed, Stream::Channel, 0);
  ChannelConfig c;
  c.sic_db = sic;
  return draw_link_state(t, c, {}, rng);
}

PairSet build(const LinkState& l, RateModel m, bool parallel = true) {
  const PairingParams p{5.0, 0.5, m};
  const auto f = FrameLengths::uniform(l.client_count(), 12000.0);
  return parallel ? build_candidate_pairs(l, {}, {}, p, f) : build_candidate_pairs_serial(l, {}, {}, p, f);
}

}  // namespace

TEST_SUITE("pairing") {
  TEST_CASE("pair airtime") {
    CHECK(pair_airtime(12000, 12000, 6.0, 12.0) == doctest::Approx(2e-3));
    CHECK(pair_airtime(12000, 0, 54.0, 0.0) == doctest::Approx(12000.0 / 54e6));
    CHECK(pair_airtime(0, 12000, 0.0, 24.0) == doctest::Approx(0.5e-3));
    CHECK_THROWS_AS(pair_airtime(12000, 12000, 6.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("pair keys") {
    CHECK(PairKey{1, 2}.full_duplex());
    CHECK(PairKey{1, 0}.half_down());
    CHECK(PairKey{0, 3}.half_up());
    CHECK(PairKey{1, 2} < PairKey{2, 0});
  }

  TEST_CASE("parallel and serial builders agree") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      const LinkState l = random_link(25, seed);
      for (RateModel m : {RateModel::WorstCase, RateModel::Reported, RateModel::Oracle}) {
        const PairSet a = build(l, m, true), b = build(l, m, false);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
          CHECK(a[k].key == b[k].key);
          CHECK(a[k].metrics.r_d_mbps == b[k].metrics.r_d_mbps);
          CHECK(a[k].metrics.r_u_mbps == b[k].metrics.r_u_mbps);
          CHECK(a[k].metrics.t_s == b[k].metrics.t_s);
        }
      }
    }
  }

  TEST_CASE("candidate set structure and worst-case metrics") {
    const RateTable rt;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const LinkState l = random_link(15, seed);
      const PairSet ps = build(l, RateModel::WorstCase);
      const double pmax = PowerConfig{}.max_tx_w();
      for (std::size_t k = 0; k < ps.size(); ++k) {
        const auto& [key, m] = ps[k];
        if (k > 0) CHECK(ps[k - 1].key < key);
        CHECK(key.down != key.up);
        if (key.down != 0) CHECK(m.r_d_mbps > 0.5);
        if (key.up != 0) CHECK(m.r_u_mbps > 0.5);
        if (key.full_duplex()) {
          CHECK(ps.contains({key.down, 0}));
          const double snr = linear_to_db(pmax * l.gain(0, key.down) / l.noise_w(key.down));
          CHECK(m.r_d_mbps == doctest::Approx(effective_throughput(rt, snr - 5.0).throughput_mbps));
          const double cap = uplink_power_cap(l.gain(key.up, key.down), l.noise_w(key.down), 5.0, pmax);
          CHECK(m.p_up_w == doctest::Approx(cap));
          const double su = linear_to_db(cap * l.gain(key.up, 0) / (l.noise_w(0) + pmax * l.self_gain()));
          CHECK(m.r_u_mbps == doctest::Approx(effective_throughput(rt, su).throughput_mbps));
          CHECK(m.t_s == doctest::Approx(std::max(12000.0 / (m.r_d_mbps * 1e6), 12000.0 / (m.r_u_mbps * 1e6))));
        }
        if (key.half_down()) {
          const double snr = linear_to_db(pmax * l.gain(0, key.down) / l.noise_w(key.down));
          CHECK(m.r_d_mbps == doctest::Approx(effective_throughput(rt, snr).throughput_mbps));
        }
      }
    }
  }

  TEST_CASE("epsilon filter drops every weak direction") {
    // client 2 is far from everybody; client 1 is close to the AP
    LinkState l(3, dbm_to_watts(-95.0), 110.0);
    l.set_gain(0, 1, 1e-7);
    l.set_gain(0, 2, 1e-16);
    l.set_gain(1, 2, 1e-16);
    const PairSet ps = build(l, RateModel::WorstCase);
    CHECK(ps.contains({1, 0}));
    CHECK(ps.contains({0, 1}));
    CHECK_FALSE(ps.contains({2, 0}));
    CHECK_FALSE(ps.contains({0, 2}));
    CHECK_FALSE(ps.contains({1, 2}));
    CHECK_FALSE(ps.contains({2, 1}));
  }

  TEST_CASE("hidden uplink client keeps full power") {
    LinkState l(3, dbm_to_watts(-95.0), 110.0);
    l.set_gain(0, 1, 1e-7);
    l.set_gain(0, 2, 1e-7);
    l.set_gain(1, 2, 0.0);
    const PairSet ps = build(l, RateModel::WorstCase);
    const CandidatePair* c = ps.find({1, 2});
    REQUIRE(c != nullptr);
    CHECK(c->metrics.p_up_w == PowerConfig{}.max_tx_w());
  }

  TEST_CASE("reported model carries the nominal uplink rate") {
    const RateTable rt;
    const LinkState l = random_link(12, 4);
    const PairSet wc = build(l, RateModel::WorstCase);
    const PairSet rep = build(l, RateModel::Reported);
    REQUIRE(wc.size() == rep.size());
    for (std::size_t k = 0; k < wc.size(); ++k) {
      if (!wc[k].key.full_duplex()) continue;
      CHECK(rep[k].metrics.r_u_mbps == rt.rate_mbps(wc[k].metrics.rate_u_index));
      CHECK(rep[k].metrics.r_u_mbps >= wc[k].metrics.r_u_mbps);
      CHECK(rep[k].metrics.r_d_mbps == wc[k].metrics.r_d_mbps);
    }
  }

  TEST_CASE("oracle downlink is never below the worst case") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const LinkState l = random_link(15, seed);
      const PairSet wc = build(l, RateModel::WorstCase);
      const PairSet orc = build(l, RateModel::Oracle);
      REQUIRE(wc.size() == orc.size());
      for (std::size_t k = 0; k < wc.size(); ++k) CHECK(orc[k].metrics.r_d_mbps >= wc[k].metrics.r_d_mbps - 1e-12);
    }
  }

  TEST_CASE("weaker suppression shrinks the full-duplex set") {
    std::size_t fd85 = 0, fd110 = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      fd85 += build(random_link(20, seed, 85.0), RateModel::WorstCase).full_duplex_count();
      fd110 += build(random_link(20, seed, 110.0), RateModel::WorstCase).full_duplex_count();
    }
    CHECK(fd85 < fd110);
  }
}
