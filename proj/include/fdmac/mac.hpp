#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fdmac/assign.hpp"
#include "fdmac/channel.hpp"
#include "fdmac/config.hpp"
#include "fdmac/pairing.hpp"
#include "fdmac/phy.hpp"
#include "fdmac/rng.hpp"

namespace fdmac {

/// Per-client frame queues. Frames have a fixed length, so a FIFO of
/// identical frames is a counter plus the head-of-line retry count.
struct QueueState {
  std::vector<std::uint64_t> down;  // at the AP, per destination client
  std::vector<std::uint64_t> up;    // at each client
  std::vector<std::uint64_t> arrived_down;  // arrivals since reset_epoch_counters
  std::vector<std::uint64_t> arrived_up;
  std::vector<int> retries_down;
  std::vector<int> retries_up;

  QueueState() = default;
  explicit QueueState(int n_clients);

  int client_count() const { return static_cast<int>(down.size()) - 1; }
  bool has_down(NodeId i) const { return down[static_cast<std::size_t>(i)] > 0; }
  bool has_up(NodeId j) const { return up[static_cast<std::size_t>(j)] > 0; }
  bool any_down() const;
  bool any_up() const;
  bool empty() const { return !any_down() && !any_up(); }
  void reset_epoch_counters();
};

/// One arrival boundary: each direction of each client enqueues a frame
/// with probability clamp(lambda * interval, 0, 1).
void step_arrivals(QueueState& queues, std::span<const double> lambda_d, std::span<const double> lambda_u,
                   double interval_s, Rng& rng);

enum class TimeCategory : int { FullDuplex = 0, HalfDown, HalfUp, Contention, Idle };
inline constexpr int kTimeCategories = 5;
using TimeBreakdown = std::array<double, kTimeCategories>;

struct TimeSegment {
  TimeCategory category = TimeCategory::Idle;
  double us = 0.0;
};

struct TxopOutcome {
  NodeId down = 0;  // downlink destination actually served (0 = none)
  NodeId up = 0;    // uplink source actually transmitting without collision (0 = none)
  bool collision = false;
  int contenders = 0;
  /// Served outside the access table (no eligible endpoint in it).
  bool fallback = false;
  /// The (down, up) configuration the txop realized, for pair statistics.
  std::optional<PairKey> realized;

  int rate_d_index = -1;
  int rate_u_index = -1;
  double p_up_w = 0.0;
  bool down_delivered = false;
  bool up_delivered = false;
  double bits_down = 0.0;
  double bits_up = 0.0;

  /// Filled for full-duplex transmissions under interference-limited power control.
  bool power_checked = false;
  double snr_d_db = 0.0;
  double sinr_d_db = 0.0;

  std::array<TimeSegment, 8> segments{};
  int n_segments = 0;

  void add(TimeCategory c, double us);
  double duration_us() const;
  double time_in(TimeCategory c) const;
};

/// Read-only view of everything a txop needs besides queues and RNG.
struct MacContext {
  const SimConfig& cfg;
  const RateTable& rates;
  const LinkState& link;       // epoch realization, used for rate and power decisions
  const LinkState& mean_link;  // path loss only, base of per-packet fading
  double p_max_w;
  double frame_bits;

  double snr_db(NodeId from, NodeId to) const;
  double airtime_us(int rate_index, double bits) const;
  /// Gain seen by one transmission: the epoch gain, or a fresh Rayleigh
  /// draw around the mean when fading is redrawn per packet.
  double txop_gain(NodeId a, NodeId b, Rng& rng) const;
};

/// PDR draw for one frame; pops it on success, counts a retry otherwise.
bool deliver_down(const MacContext& ctx, QueueState& q, NodeId i, int rate_index, double sinr_db, Rng& rng,
                  TxopOutcome& out);
bool deliver_up(const MacContext& ctx, QueueState& q, NodeId j, int rate_index, double sinr_db, Rng& rng,
                TxopOutcome& out);

struct ToneResult {
  int winner = 0;
  int rounds = 1;
};

/// Frequency-domain contention: every AP tones on a random sub-channel, the
/// lowest unique pick wins, an equal lowest pick is retried.
ToneResult tone_contention(int n_aps, int subchannels, Rng& rng);

/// One probabilistic Down-Up transmission opportunity driven by the table.
TxopOutcome run_txop(const MacContext& ctx, const AccessTable& table, const PairSet& pairs, QueueState& queues,
                     Rng& rng);

struct EpochStats {
  double bits_down = 0.0;
  double bits_up = 0.0;
  TimeBreakdown time_us{};
  long txops = 0;
  long collisions = 0;
  double contention_us = 0.0;
  long fd_checks = 0;
  long fd_violations = 0;

  bool operator==(const EpochStats&) const = default;
};

struct ClientStats {
  double bits_down = 0.0;
  double bits_up = 0.0;
  long downlink_tx = 0;
  long uplink_tx = 0;

  bool operator==(const ClientStats&) const = default;
};

struct PairFrequency {
  double assigned = 0.0;  // sum over txops of the assigned probability
  double realized = 0.0;  // txops that realized this pair

  bool operator==(const PairFrequency&) const = default;
};

struct SimReport {
  Scheme scheme = Scheme::Proposed;
  int n_clients = 0;
  std::uint64_t seed = 0;
  int epochs = 0;
  double epoch_s = 0.0;

  double bits_down = 0.0;
  double bits_up = 0.0;
  TimeBreakdown time_us{};
  long txops = 0;
  long collisions = 0;
  long fallback_txops = 0;
  double contention_us = 0.0;
  long fd_checks = 0;
  long fd_violations = 0;
  double min_fd_margin_db = 0.0;  // min of (sinr_d - (snr_d - delta)); +inf-like when unused

  long lp_solves = 0;
  long lp_iterations = 0;
  long relaxed_shares = 0;

  std::vector<ClientStats> clients;  // index 1..C
  std::map<PairKey, PairFrequency> pairs;
  long table_txops = 0;
  std::vector<EpochStats> epoch_stats;

  double duration_s() const { return epochs * epoch_s; }
  double tput_down_mbps() const;
  double tput_up_mbps() const;
  double tput_total_mbps() const { return tput_down_mbps() + tput_up_mbps(); }
  double collision_prob() const;
  double fd_time_frac() const;
  double hd_time_frac() const;
  double mean_contention_us() const;

  bool operator==(const SimReport&) const = default;
};

/// Epoch-level inputs handed to a scheme.
struct EpochInputs {
  const MacContext& ctx;
  const DemandSnapshot& demands;
  int epoch = 0;
};

class SchemePolicy {
 public:
  virtual ~SchemePolicy() = default;
  virtual void begin_epoch(const EpochInputs& in) = 0;
  virtual TxopOutcome run_txop(const MacContext& ctx, QueueState& queues, Rng& rng) = 0;
  /// Announced table of the current epoch, when the scheme has one.
  virtual const AccessTable* access_table() const { return nullptr; }
  virtual const EpochAssignment* assignment() const { return nullptr; }
};

/// Proposed (reported rates) and Oracle (exact rates).
class ProbabilisticPolicy final : public SchemePolicy {
 public:
  explicit ProbabilisticPolicy(RateModel model) : model_(model) {}
  void begin_epoch(const EpochInputs& in) override;
  TxopOutcome run_txop(const MacContext& ctx, QueueState& queues, Rng& rng) override;
  const AccessTable* access_table() const override { return &assignment_.table; }
  const EpochAssignment* assignment() const override { return &assignment_; }

 private:
  RateModel model_;
  EpochAssignment assignment_;
};

/// Scheme factory (baselines live in baselines.hpp).
std::unique_ptr<SchemePolicy> make_policy(Scheme scheme);

/// One independent simulation replica: sequential and deterministic.
class Replica {
 public:
  explicit Replica(const SimConfig& cfg);
  Replica(const SimConfig& cfg, Topology topology);
  Replica(const SimConfig& cfg, Topology topology, std::unique_ptr<SchemePolicy> policy);

  EpochStats run_epoch();
  void run();

  const SimReport& report() const { return report_; }
  const Topology& topology() const { return topo_; }
  const LinkState& link_state() const { return link_; }
  const QueueState& queues() const { return queues_; }
  const SchemePolicy& policy() const { return *policy_; }
  const std::vector<double>& lambda_d() const { return lambda_d_; }
  const std::vector<double>& lambda_u() const { return lambda_u_; }
  int epoch() const { return epoch_; }

  /// Per-epoch access-table dump (Proposed / Oracle only).
  void set_access_dump(std::ostream* os) { access_dump_ = os; }
  /// Invoked after every txop; used by tests to inspect outcomes.
  void set_txop_observer(std::function<void(const TxopOutcome&)> fn) { observer_ = std::move(fn); }

 private:
  DemandSnapshot current_demands() const;
  void record(const TxopOutcome& out, EpochStats& stats);
  void advance_arrivals(double until_us);

  SimConfig cfg_;
  RateTable rates_;
  Topology topo_;
  LinkState mean_link_;
  LinkState link_;
  QueueState queues_;
  std::vector<double> lambda_d_;
  std::vector<double> lambda_u_;
  std::vector<double> measured_d_;
  std::vector<double> measured_u_;
  Rng traffic_rng_;
  Rng mac_rng_;
  std::unique_ptr<SchemePolicy> policy_;
  double next_arrival_us_ = 0.0;
  std::uint64_t arrival_index_ = 0;
  TimeBreakdown carry_{};
  int epoch_ = 0;
  std::ostream* access_dump_ = nullptr;
  std::function<void(const TxopOutcome&)> observer_;
  SimReport report_;
};

EpochStats run_epoch(Replica& replica);

/// Runs every epoch of one configuration.
SimReport run_simulation(const SimConfig& cfg);

/// Independent replicas spread over OpenMP threads; results in input order.
std::vector<SimReport> run_simulations(const std::vector<SimConfig>& configs);

/// Single-threaded reference of run_simulations.
std::vector<SimReport> run_simulations_serial(const std::vector<SimConfig>& configs);

}  // namespace fdmac
