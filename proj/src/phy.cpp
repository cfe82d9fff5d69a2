#include "fdmac/phy.hpp"

#include <cmath>
#include <stdexcept>

#include "fdmac/channel.hpp"

namespace fdmac {

RateTable::RateTable()
    : RateTable({6, 9, 12, 18, 24, 36, 48, 54}, {5, 6, 8, 11, 15, 19, 23, 25}, 2.0) {}

RateTable::RateTable(std::vector<double> rates_mbps, std::vector<double> threshold_db,
                     double steepness_per_db)
    : rates_(std::move(rates_mbps)), thresholds_(std::move(threshold_db)), steepness_(steepness_per_db) {
  if (rates_.empty()) throw std::invalid_argument("RateTable: empty rate set");
  if (rates_.size() != thresholds_.size())
    throw std::invalid_argument("RateTable: one threshold per rate required");
  if (!(steepness_ > 0.0)) throw std::invalid_argument("RateTable: steepness must be positive");
  for (std::size_t i = 1; i < rates_.size(); ++i) {
    if (!(rates_[i] > rates_[i - 1])) throw std::invalid_argument("RateTable: rates must increase");
    if (!(thresholds_[i] > thresholds_[i - 1]))
      throw std::invalid_argument("RateTable: thresholds must increase with rate");
  }
  if (!(rates_.front() > 0.0)) throw std::invalid_argument("RateTable: rates must be positive");
}

int RateTable::index_of(double rate_mbps) const {
  for (std::size_t i = 0; i < rates_.size(); ++i)
    if (rates_[i] == rate_mbps) return static_cast<int>(i);
  throw std::invalid_argument("RateTable: unknown rate " + std::to_string(rate_mbps));
}

int RateTable::feedback_bits() const {
  int bits = 0;
  while ((1 << bits) < size()) ++bits;
  return bits == 0 ? 1 : bits;
}

double pdr_at(const RateTable& table, int rate_index, double sinr_db) {
  const double x = -table.steepness_per_db() * (sinr_db - table.threshold_db(rate_index));
  return 1.0 / (1.0 + std::exp(x));
}

double pdr(const RateTable& table, double rate_mbps, double sinr_db) {
  return pdr_at(table, table.index_of(rate_mbps), sinr_db);
}

RateChoice effective_throughput(const RateTable& table, double sinr_db) {
  RateChoice best{0, table.rate_mbps(0), table.rate_mbps(0) * pdr_at(table, 0, sinr_db)};
  for (int k = 1; k < table.size(); ++k) {
    const double r = table.rate_mbps(k) * pdr_at(table, k, sinr_db);
    if (r > best.throughput_mbps) best = {k, table.rate_mbps(k), r};
  }
  return best;
}

RateChoice select_downlink_rate(const RateTable& table, double snr_d_db, double delta_db) {
  return effective_throughput(table, snr_d_db - delta_db);
}

double uplink_power_cap(double gain_ji, double noise_i_w, double delta_db, double max_tx_w) {
  if (gain_ji <= 0.0) return max_tx_w;
  const double allowed_ici = (db_to_linear(delta_db) - 1.0) * noise_i_w;
  return std::min(max_tx_w, allowed_ici / gain_ji);
}

RateChoice select_uplink_rate(const RateTable& table, double p_up_w, double gain_j0, double self_gain,
                              double p_ap_w, double noise_ap_w) {
  const double sinr = sinr_uplink(p_up_w, p_ap_w, gain_j0, self_gain, noise_ap_w);
  return effective_throughput(table, linear_to_db(sinr));
}

std::vector<bool> encode_rate_feedback(std::span<const int> indices, const RateTable& table) {
  const int width = table.feedback_bits();
  std::vector<bool> bits;
  bits.reserve(indices.size() * static_cast<std::size_t>(width));
  for (const int idx : indices) {
    if (idx < 0 || idx >= table.size())
      throw std::invalid_argument("encode_rate_feedback: rate index out of range");
    for (int b = width - 1; b >= 0; --b) bits.push_back(((idx >> b) & 1) != 0);
  }
  return bits;
}

std::vector<int> decode_rate_feedback(const std::vector<bool>& bits, const RateTable& table) {
  const auto width = static_cast<std::size_t>(table.feedback_bits());
  if (bits.size() % width != 0)
    throw std::invalid_argument("decode_rate_feedback: length is not a multiple of the entry width");
  std::vector<int> out;
  out.reserve(bits.size() / width);
  for (std::size_t pos = 0; pos < bits.size(); pos += width) {
    int idx = 0;
    for (std::size_t b = 0; b < width; ++b) idx = (idx << 1) | (bits[pos + b] ? 1 : 0);
    if (idx >= table.size()) throw std::invalid_argument("decode_rate_feedback: index out of range");
    out.push_back(idx);
  }
  return out;
}

}  // namespace fdmac
