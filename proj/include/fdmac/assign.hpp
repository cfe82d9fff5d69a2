#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "fdmac/channel.hpp"
#include "fdmac/lp.hpp"
#include "fdmac/pairing.hpp"
#include "fdmac/phy.hpp"

namespace fdmac {

/// Demand measured over the previous epoch. Vectors are indexed by client
/// id 1..C; index 0 is unused.
struct DemandSnapshot {
  std::vector<double> lambda_d;  // frames/s
  std::vector<double> lambda_u;
  std::vector<double> l_d_bits;
  std::vector<double> l_u_bits;
  double epoch_s = 0.1;

  int client_count() const { return static_cast<int>(lambda_d.size()) - 1; }
  void validate() const;

  static DemandSnapshot uniform(int n_clients, double lambda_fps, double frame_bits, double epoch_s);
};

/// Minimum transmission opportunities per client and direction.
struct MinShares {
  std::vector<double> eta_d;
  std::vector<double> eta_u;
};

/// Average lowest-rate transmission time over every client and direction.
double mean_lowest_rate_airtime(const DemandSnapshot& demands, const RateTable& rates);

/// Max-min water filling of the per-direction demands lambda*T over an epoch
/// of T / t_bar lowest-rate slots.
MinShares min_fair_shares(const DemandSnapshot& demands, double t_bar_s);

enum class AssignStatus { Optimal, Infeasible };

struct Allocation {
  AssignStatus status = AssignStatus::Optimal;
  std::vector<PairKey> keys;  // same order as the PairSet
  std::vector<double> n;      // opportunities per epoch
  double objective_bps = 0.0;
  long lp_iterations = 0;
  /// Directions with eta > 0 but no candidate pair at all.
  std::vector<NodeId> uncovered_down;
  std::vector<NodeId> uncovered_up;

  double total() const;
};

/// maximize sum n*l/T s.t. per-client lower bounds eta, demand caps lambda*T
/// and the airtime budget sum n*t <= T. Caps that the airtime budget already
/// implies are left out of the LP.
Allocation solve_assignment(const PairSet& pairs, const DemandSnapshot& demands, const MinShares& shares,
                            const lp::Options& options = {});

/// sum n*l/T of a given allocation vector (same order as pairs).
double allocation_throughput_bps(const PairSet& pairs, const DemandSnapshot& demands,
                                 const std::vector<double>& n);

using ProbabilityMap = std::map<PairKey, double>;

/// p = n / sum n. Empty when sum n == 0 (idle epoch).
ProbabilityMap to_probabilities(const Allocation& allocation);

/// p_d(i) = sum_j p(i, j), including i = 0.
std::map<NodeId, double> downlink_marginals(const ProbabilityMap& p);

/// p_u(i, j) = p(i, j) / p_d(i). Throws std::domain_error when p_d(i) == 0.
ProbabilityMap conditional_uplink(const ProbabilityMap& p, const std::map<NodeId, double>& p_d);

/// min(ceil(1 / p_u), cw_max); nullopt when p_u == 0 (never contends).
std::optional<int> contention_window(double p_u, int cw_max);

struct AccessEntry {
  NodeId up = 0;
  double p = 0.0;
  double p_u = 0.0;
  int cw = 1;
  std::size_t pair_index = 0;  // into the epoch's PairSet
};

/// Compiled per-epoch table the MAC samples from.
class AccessTable {
 public:
  AccessTable() = default;
  AccessTable(const ProbabilityMap& p, const PairSet& pairs, int n_clients, int cw_max);

  bool idle() const { return idle_; }
  int client_count() const { return static_cast<int>(p_d_.size()) - 1; }
  double p_d(NodeId i) const { return p_d_[static_cast<std::size_t>(i)]; }
  const std::vector<AccessEntry>& entries(NodeId down) const { return by_down_[static_cast<std::size_t>(down)]; }
  const AccessEntry* find(PairKey key) const;
  double probability(PairKey key) const;
  /// True when some uplink client may join a downlink to i.
  bool has_full_duplex(NodeId down) const;

 private:
  bool idle_ = true;
  std::vector<double> p_d_;
  std::vector<std::vector<AccessEntry>> by_down_;
};

struct AssignConfig {
  PairingParams pairing;
  int cw_max = 1024;
  PowerConfig power;
  RateTable rates;
  lp::Options lp;
};

struct EpochAssignment {
  PairSet pairs;
  MinShares shares;
  Allocation allocation;
  ProbabilityMap probabilities;
  AccessTable table;
  int relaxed_shares = 0;  // eta entries zeroed to restore feasibility
};

/// Min shares, LP, probabilities and contention windows for one epoch.
EpochAssignment assign_epoch(const DemandSnapshot& demands, const LinkState& link, const AssignConfig& cfg);

/// Same pipeline on an already built candidate set.
EpochAssignment assign_with_pairs(const DemandSnapshot& demands, PairSet pairs, const AssignConfig& cfg);

/// Plain-text dump: pair, n, p, p_d, p_u, CW.
void write_access_table(std::ostream& os, const EpochAssignment& a);

}  // namespace fdmac
