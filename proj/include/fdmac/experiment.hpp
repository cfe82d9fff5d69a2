#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fdmac/config.hpp"
#include "fdmac/mac.hpp"

namespace fdmac {

enum class SweepAxis { None, Clients, ArrivalRate, Delta, Sic, Scheme };

std::string_view to_string(SweepAxis axis);
/// Accepts clients, arrival_rate (or arrival), delta, sic, scheme.
SweepAxis parse_axis(std::string_view name);

/// "lo:hi:step" (inclusive) or a comma-separated list.
std::vector<double> parse_sweep_values(std::string_view text);

struct Scenario {
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;  // numeric axes
  std::vector<Scheme> schemes{Scheme::Proposed};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  SimConfig base;

  /// Non-empty axis values, schemes and seeds.
  void validate() const;
};

/// Applies "axis=values" to the scenario. The scheme axis takes scheme names.
void apply_sweep(Scenario& scenario, std::string_view spec);

/// One config per (axis value, scheme, seed), in that nesting order.
std::vector<SimConfig> expand(const Scenario& scenario);

struct ScenarioResult {
  std::vector<SimConfig> configs;
  std::vector<SimReport> reports;
};

/// Runs every point concurrently; results keep the expand() order.
ScenarioResult run_scenario(const Scenario& scenario);

/// Mean per-client rate of a config (scalar, range midpoint or explicit mean).
double nominal_arrival_fps(const SimConfig& cfg);

/// Column names of the summary file, in order.
const std::vector<std::string>& summary_columns();

/// One row per point. Throughputs in Mb/s, times in microseconds.
void write_summary_csv(std::ostream& os, const ScenarioResult& result);
/// One row per (point, client): uplink/downlink counts and uplink access share.
void write_per_client_csv(std::ostream& os, const ScenarioResult& result);
/// One row per (point, pair) for table-driven schemes: assigned and realized probability.
void write_per_pair_csv(std::ostream& os, const ScenarioResult& result);

}  // namespace fdmac
