#pragma once

#include <span>
#include <vector>

namespace fdmac {

/// Bit-rate set with a logistic packet-delivery-ratio surrogate per rate:
/// PDR(rate, s) = 1 / (1 + exp(-k (s - threshold(rate)))), s in dB.
class RateTable {
 public:
  /// 802.11a rates {6..54} Mb/s with the default thresholds and k = 2/dB.
  RateTable();
  RateTable(std::vector<double> rates_mbps, std::vector<double> threshold_db, double steepness_per_db);

  int size() const { return static_cast<int>(rates_.size()); }
  double rate_mbps(int index) const { return rates_.at(static_cast<std::size_t>(index)); }
  double threshold_db(int index) const { return thresholds_.at(static_cast<std::size_t>(index)); }
  double steepness_per_db() const { return steepness_; }
  const std::vector<double>& rates() const { return rates_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

  /// Throws std::invalid_argument if rate_mbps is not in the table.
  int index_of(double rate_mbps) const;

  /// Width of one feedback entry, ceil(log2 |R|).
  int feedback_bits() const;

 private:
  std::vector<double> rates_;
  std::vector<double> thresholds_;
  double steepness_;
};

struct RateChoice {
  int index = 0;
  double rate_mbps = 0.0;
  double throughput_mbps = 0.0;  // rate * PDR
};

double pdr_at(const RateTable& table, int rate_index, double sinr_db);
double pdr(const RateTable& table, double rate_mbps, double sinr_db);

/// argmax over rates of rate * PDR(rate, sinr_db); ties go to the lower rate.
RateChoice effective_throughput(const RateTable& table, double sinr_db);

/// Rate the AP can keep under an ICI margin of delta_db.
RateChoice select_downlink_rate(const RateTable& table, double snr_d_db, double delta_db);

/// Largest uplink power keeping ICI / noise at the downlink client below
/// 10^(delta/10) - 1, capped at max_tx_w. A zero gain (hidden node) gets full power.
double uplink_power_cap(double gain_ji, double noise_i_w, double delta_db, double max_tx_w);

RateChoice select_uplink_rate(const RateTable& table, double p_up_w, double gain_j0, double self_gain,
                              double p_ap_w, double noise_ap_w);

/// Packs rate indices MSB-first, feedback_bits() per entry.
std::vector<bool> encode_rate_feedback(std::span<const int> indices, const RateTable& table);
std::vector<int> decode_rate_feedback(const std::vector<bool>& bits, const RateTable& table);

}  // namespace fdmac
