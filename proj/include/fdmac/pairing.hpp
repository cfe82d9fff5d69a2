#pragma once

#include <compare>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fdmac/channel.hpp"
#include "fdmac/phy.hpp"

namespace fdmac {

/// (down, up). 0 on either side marks the half-duplex "virtual" endpoint.
struct PairKey {
  NodeId down = 0;
  NodeId up = 0;

  bool full_duplex() const { return down != 0 && up != 0; }
  bool half_down() const { return down != 0 && up == 0; }
  bool half_up() const { return down == 0 && up != 0; }
  auto operator<=>(const PairKey&) const = default;
};

struct PairMetrics {
  double r_d_mbps = 0.0;
  double r_u_mbps = 0.0;
  double r_total_mbps = 0.0;
  double t_s = 0.0;
  double l_d_bits = 0.0;
  double l_u_bits = 0.0;
  // Rates and uplink power the MAC uses when this pair is realized.
  int rate_d_index = -1;
  int rate_u_index = -1;
  double p_up_w = 0.0;
};

struct CandidatePair {
  PairKey key;
  PairMetrics metrics;
};

/// Candidate pairs sorted by key.
class PairSet {
 public:
  PairSet() = default;
  explicit PairSet(std::vector<CandidatePair> pairs);

  const std::vector<CandidatePair>& entries() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const CandidatePair& operator[](std::size_t i) const { return pairs_[i]; }

  bool contains(PairKey key) const { return find(key) != nullptr; }
  const CandidatePair* find(PairKey key) const;
  std::optional<std::size_t> index_of(PairKey key) const;

  std::size_t full_duplex_count() const;
  std::size_t half_duplex_count() const { return pairs_.size() - full_duplex_count(); }

 private:
  std::vector<CandidatePair> pairs_;
};

/// How the AP values each candidate pair.
enum class RateModel {
  /// r_d at SNR_d - delta, r_u exact under the power cap.
  WorstCase,
  /// r_d at SNR_d - delta, r_u is the nominal bit-rate the client reports
  /// through the quantized feedback.
  Reported,
  /// r_d at the downlink SINR the capped uplink actually leaves, r_u exact.
  Oracle,
};

/// Mean frame lengths per client, indexed 1..C (index 0 unused).
struct FrameLengths {
  std::vector<double> l_d_bits;
  std::vector<double> l_u_bits;

  static FrameLengths uniform(int n_clients, double bits);
};

struct PairingParams {
  double delta_db = 5.0;
  double epsilon_mbps = 0.5;
  RateModel model = RateModel::WorstCase;
};

/// t = max over present directions of l / r. A direction is present when its
/// length is positive; a present direction with r <= 0 is an error.
double pair_airtime(double l_d_bits, double l_u_bits, double r_d_mbps, double r_u_mbps);

/// P_full U P_half, each direction filtered by r > epsilon. Rows (one per
/// downlink endpoint) are evaluated in parallel.
PairSet build_candidate_pairs(const LinkState& link, const PowerConfig& power, const RateTable& rates,
                              const PairingParams& params, const FrameLengths& frames);

/// Single-threaded reference of build_candidate_pairs.
PairSet build_candidate_pairs_serial(const LinkState& link, const PowerConfig& power,
                                     const RateTable& rates, const PairingParams& params,
                                     const FrameLengths& frames);

/// Plain-text table: pair, r_d, r_u, t.
void write_pair_table(std::ostream& os, const PairSet& pairs);

}  // namespace fdmac
