#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <sstream>

#include "fdmac/experiment.hpp"

using namespace fdmac;

namespace {

Scenario tiny() {
  Scenario sc;
  sc.base.n_clients = 4;
  sc.base.epochs = 3;
  sc.seeds = {1, 2};
  return sc;
}

std::string summary(const ScenarioResult& r) {
  std::ostringstream os;
  write_summary_csv(os, r);
  return os.str();
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("sweep value parsing") {
    CHECK(parse_sweep_values("10:50:10") == std::vector<double>{10, 20, 30, 40, 50});
    CHECK(parse_sweep_values("0:1:0.25").size() == 5);
    CHECK(parse_sweep_values("85,95,110") == std::vector<double>{85, 95, 110});
    CHECK_THROWS_AS(parse_sweep_values("5:1:1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_values("1:5:0"), std::invalid_argument);
    CHECK_THROWS(parse_sweep_values("a,b"));
    CHECK(parse_axis("arrival-rate") == SweepAxis::ArrivalRate);
    CHECK(parse_axis("SIC") == SweepAxis::Sic);
    CHECK_THROWS_AS(parse_axis("power"), std::invalid_argument);
  }

  TEST_CASE("a full client sweep expands to one row per point") {
    Scenario sc;
    apply_sweep(sc, "clients=10:50:10");
    apply_sweep(sc, "scheme=proposed,oracle,maxrate,greedy,random,halfduplex");
    const auto cfgs = expand(sc);
    REQUIRE(cfgs.size() == 150);
    CHECK(cfgs.front().n_clients == 10);
    CHECK(cfgs.front().scheme == Scheme::Proposed);
    CHECK(cfgs[1].seed == 2);
    CHECK(cfgs[5].scheme == Scheme::Oracle);
    CHECK(cfgs.back().n_clients == 50);
    CHECK(cfgs.back().scheme == Scheme::HalfDuplex);
    CHECK(cfgs.back().seed == 5);
    CHECK_THROWS_AS(apply_sweep(sc, "delta=0,5"), std::invalid_argument);
    CHECK_THROWS_AS(apply_sweep(sc, "clients"), std::invalid_argument);
  }

  TEST_CASE("numeric axes set the swept field") {
    Scenario sc;
    apply_sweep(sc, "sic=85,110");
    CHECK(expand(sc)[0].sic_db == 85);
    Scenario a;
    a.base.arrival_lo_fps = 0;
    a.base.arrival_hi_fps = 80;
    apply_sweep(a, "arrival_rate=16");
    CHECK(expand(a)[0].arrival_fps == 16);
    CHECK_FALSE(expand(a)[0].heterogeneous());
  }

  TEST_CASE("summary header and rows") {
    Scenario sc = tiny();
    apply_sweep(sc, "scheme=proposed,halfduplex");
    const ScenarioResult r = run_scenario(sc);
    const std::string s = summary(r);
    std::istringstream is(s);
    std::string header;
    std::getline(is, header);
    CHECK(header ==
          "scheme,n_clients,arrival_fps,delta_db,sic_db,seed,tput_total_mbps,tput_down_mbps,tput_up_mbps,"
          "collision_prob,fd_time_frac,hd_time_frac,mean_contention_us");
    int rows = 0;
    std::string line;
    while (std::getline(is, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') == 12);
    }
    CHECK(rows == 4);
    CHECK(s.find("\nproposed,4,2000,5,110,1,") != std::string::npos);
  }

  TEST_CASE("reruns are byte identical") {
    Scenario sc = tiny();
    apply_sweep(sc, "scheme=proposed,greedy,random");
    const ScenarioResult a = run_scenario(sc);
    const ScenarioResult b = run_scenario(sc);
    CHECK(summary(a) == summary(b));
    std::ostringstream pa, pb, ca, cb;
    write_per_pair_csv(pa, a);
    write_per_pair_csv(pb, b);
    write_per_client_csv(ca, a);
    write_per_client_csv(cb, b);
    CHECK(pa.str() == pb.str());
    CHECK(ca.str() == cb.str());
    const std::string clients = ca.str();
    CHECK(std::count(clients.begin(), clients.end(), '\n') == 1 + 6 * 4);
  }

  TEST_CASE("per-pair probabilities sum to one per point") {
    const ScenarioResult r = run_scenario(tiny());
    for (const SimReport& rep : r.reports) {
      REQUIRE(rep.table_txops > 0);
      double assigned = 0.0;
      for (const auto& [k, f] : rep.pairs) assigned += f.assigned;
      CHECK(assigned / static_cast<double>(rep.table_txops) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("heterogeneous demand draws per-client rates in range") {
    SimConfig c;
    c.n_clients = 30;
    c.epochs = 1;
    c.arrival_lo_fps = 0;
    c.arrival_hi_fps = 80;
    const Replica r(c);
    for (int k = 1; k <= 30; ++k) {
      CHECK(r.lambda_d()[static_cast<std::size_t>(k)] >= 0.0);
      CHECK(r.lambda_d()[static_cast<std::size_t>(k)] <= 80.0);
      CHECK(r.lambda_u()[static_cast<std::size_t>(k)] == r.lambda_d()[static_cast<std::size_t>(k)]);
    }
    CHECK(nominal_arrival_fps(c) == 40.0);
    SimConfig other = c;
    other.scheme = Scheme::HalfDuplex;
    CHECK(Replica(other).lambda_d() == r.lambda_d());
  }

  TEST_CASE("config print and load round trip") {
    SimConfig c;
    c.n_clients = 17;
    c.delta_db = 7.5;
    c.scheme = Scheme::Greedy;
    c.fading_per_packet = true;
    c.lambda_d_fps = {0, 1.5, 2.5};
    std::ostringstream os;
    print_config(os, c);
    SimConfig back;
    std::istringstream is(os.str());
    load_config(is, back);
    CHECK(back.n_clients == 17);
    CHECK(back.delta_db == 7.5);
    CHECK(back.scheme == Scheme::Greedy);
    CHECK(back.fading_per_packet);
    CHECK(back.lambda_d_fps == c.lambda_d_fps);
    std::ostringstream again;
    print_config(again, back);
    CHECK(again.str() == os.str());
  }

  TEST_CASE("config errors name the fields") {
    SimConfig c;
    c.n_clients = 0;
    c.slot_us = -1;
    const auto bad = c.validation_errors();
    CHECK(std::find(bad.begin(), bad.end(), "n_clients") != bad.end());
    CHECK(std::find(bad.begin(), bad.end(), "slot_us") != bad.end());
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "bogus", "1"), ConfigError);
    CHECK_THROWS_AS(set_config_value(c, "epochs", "ten"), ConfigError);
    std::istringstream is("epochs 10\n");
    CHECK_THROWS_AS(load_config(is, c), ConfigError);
    CHECK_THROWS_AS(parse_scheme("csma"), ConfigError);
  }
}
