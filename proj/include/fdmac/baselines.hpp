#pragma once

#include <vector>

#include "fdmac/mac.hpp"

namespace fdmac {

/// 802.11 DCF backoff at slot granularity. Counters persist across rounds;
/// a station draws from [0, CW-1] the first time it is active and after
/// every attempt. CW resets on success and doubles on collision.
class DcfContention {
 public:
  DcfContention() = default;
  DcfContention(int stations, int cw_min, int cw_max);

  struct Round {
    std::vector<int> winners;
    int slots = 0;
  };

  /// Counts down every active station by the smallest counter; stations
  /// reaching zero transmit. Empty winners when nobody is active.
  Round contend(const std::vector<char>& active, Rng& rng);
  void on_success(int station, Rng& rng);
  void on_collision(int station, Rng& rng);

  int station_count() const { return static_cast<int>(cw_.size()); }
  int cw(int station) const { return cw_[static_cast<std::size_t>(station)]; }
  int counter(int station) const { return counter_[static_cast<std::size_t>(station)]; }

 private:
  void redraw(int station, Rng& rng);

  int cw_min_ = 16;
  int cw_max_ = 1024;
  std::vector<int> cw_;
  std::vector<int> counter_;  // -1: not drawn yet
};

struct GreedyCandidate {
  PairKey key;
  double value_mbps = 0.0;
};

/// Full-duplex pairs valued at full uplink power: r_d under the raw ICI plus
/// r_u under residual self-interference. Pairs with either rate <= epsilon
/// are left out.
std::vector<GreedyCandidate> greedy_candidates(const LinkState& link, const PowerConfig& power,
                                               const RateTable& rates, double epsilon_mbps);

/// Repeatedly takes the highest-valued remaining pair and drops every other
/// pair sharing an endpoint with it. Ties go to the smaller key.
std::vector<PairKey> greedy_pairing(std::vector<GreedyCandidate> candidates);

/// Downlink uniform over queued clients; the queued client with the highest
/// power-capped uplink rate joins without contention.
class MaxRatePolicy final : public SchemePolicy {
 public:
  void begin_epoch(const EpochInputs& in) override;
  TxopOutcome run_txop(const MacContext& ctx, QueueState& queues, Rng& rng) override;

 private:
  PairSet pairs_;
};

/// Fixed node-disjoint pairing per epoch; pairs and leftover endpoints
/// contend with DCF at full power.
class GreedyPolicy final : public SchemePolicy {
 public:
  void begin_epoch(const EpochInputs& in) override;
  TxopOutcome run_txop(const MacContext& ctx, QueueState& queues, Rng& rng) override;

  const std::vector<PairKey>& pairing() const { return pairing_; }

 private:
  struct Unit {
    NodeId down = 0;  // 0: none
    NodeId up = 0;    // 0: none
    bool ap_pool = false;  // serves every unpaired downlink
    int station = 0;  // DCF identity: 0 AP pool, i pair led by i, C + c uplink of c
  };
  bool active(const Unit& u, const QueueState& q) const;

  std::vector<PairKey> pairing_;
  std::vector<Unit> units_;
  std::vector<char> paired_down_;
  DcfContention dcf_;
};

/// Downlink uniform over queued clients, uplink by 802.11 backoff with no
/// ICI awareness, every node at full power, rates matched to the realized SINR.
class RandomPolicy final : public SchemePolicy {
 public:
  void begin_epoch(const EpochInputs& in) override;
  TxopOutcome run_txop(const MacContext& ctx, QueueState& queues, Rng& rng) override;

 private:
  DcfContention dcf_;
};

/// Plain DCF over the AP and every client, half-duplex only.
class HalfDuplexPolicy final : public SchemePolicy {
 public:
  void begin_epoch(const EpochInputs& in) override;
  TxopOutcome run_txop(const MacContext& ctx, QueueState& queues, Rng& rng) override;

 private:
  DcfContention dcf_;
};

}  // namespace fdmac
