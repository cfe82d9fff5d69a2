#include "fdmac/pairing.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace fdmac {

PairSet::PairSet(std::vector<CandidatePair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end(),
            [](const CandidatePair& a, const CandidatePair& b) { return a.key < b.key; });
}

const CandidatePair* PairSet::find(PairKey key) const {
  const auto idx = index_of(key);
  return idx ? &pairs_[*idx] : nullptr;
}

std::optional<std::size_t> PairSet::index_of(PairKey key) const {
  const auto it = std::lower_bound(pairs_.begin(), pairs_.end(), key,
                                   [](const CandidatePair& p, PairKey k) { return p.key < k; });
  if (it == pairs_.end() || it->key != key) return std::nullopt;
  return static_cast<std::size_t>(it - pairs_.begin());
}

std::size_t PairSet::full_duplex_count() const {
  return static_cast<std::size_t>(std::count_if(
      pairs_.begin(), pairs_.end(), [](const CandidatePair& p) { return p.key.full_duplex(); }));
}

FrameLengths FrameLengths::uniform(int n_clients, double bits) {
  FrameLengths f;
  f.l_d_bits.assign(static_cast<std::size_t>(n_clients) + 1, bits);
  f.l_u_bits.assign(static_cast<std::size_t>(n_clients) + 1, bits);
  return f;
}

double pair_airtime(double l_d_bits, double l_u_bits, double r_d_mbps, double r_u_mbps) {
  double t = 0.0;
  if (l_d_bits > 0.0) {
    if (!(r_d_mbps > 0.0)) throw std::invalid_argument("pair_airtime: zero downlink rate");
    t = std::max(t, l_d_bits / (r_d_mbps * 1e6));
  }
  if (l_u_bits > 0.0) {
    if (!(r_u_mbps > 0.0)) throw std::invalid_argument("pair_airtime: zero uplink rate");
    t = std::max(t, l_u_bits / (r_u_mbps * 1e6));
  }
  return t;
}

namespace {

struct RowInputs {
  const LinkState& link;
  const RateTable& rates;
  const PairingParams& params;
  const FrameLengths& frames;
  double p_max;
  // reported[i * (C+1) + j]: rate index client j fed back for downlink i
  const std::vector<int>& reported;
};

double snr_db(const LinkState& link, double p_w, NodeId a, NodeId b) {
  return linear_to_db(p_w * link.gain(a, b) / link.noise_w(b));
}

/// Exact uplink choice of client j while the AP serves i under the cap.
struct UplinkPlan {
  double p_up_w;
  RateChoice choice;
};

UplinkPlan plan_uplink(const LinkState& link, const RateTable& rates, double delta_db, double p_max,
                       NodeId i, NodeId j) {
  const double p_up = uplink_power_cap(link.gain(j, i), link.noise_w(i), delta_db, p_max);
  const RateChoice c =
      select_uplink_rate(rates, p_up, link.gain(j, kAp), link.self_gain(), p_max, link.noise_w(kAp));
  return {p_up, c};
}

std::vector<CandidatePair> pairs_for_downlink(const RowInputs& in, NodeId i) {
  const LinkState& link = in.link;
  const int clients = link.client_count();
  const double eps = in.params.epsilon_mbps;
  std::vector<CandidatePair> row;

  if (i == kAp) {
    for (NodeId j = 1; j <= clients; ++j) {
      const RateChoice c = effective_throughput(in.rates, snr_db(link, in.p_max, j, kAp));
      if (!(c.throughput_mbps > eps)) continue;
      PairMetrics m;
      m.r_u_mbps = c.throughput_mbps;
      m.r_total_mbps = m.r_u_mbps;
      m.l_u_bits = in.frames.l_u_bits[static_cast<std::size_t>(j)];
      m.t_s = pair_airtime(0.0, m.l_u_bits, 0.0, m.r_u_mbps);
      m.rate_u_index = c.index;
      m.p_up_w = in.p_max;
      row.push_back({{kAp, j}, m});
    }
    return row;
  }

  const double snr_d = snr_db(link, in.p_max, kAp, i);
  const double l_d = in.frames.l_d_bits[static_cast<std::size_t>(i)];

  const RateChoice hd = effective_throughput(in.rates, snr_d);
  if (hd.throughput_mbps > eps) {
    PairMetrics m;
    m.r_d_mbps = hd.throughput_mbps;
    m.r_total_mbps = m.r_d_mbps;
    m.l_d_bits = l_d;
    m.t_s = pair_airtime(l_d, 0.0, m.r_d_mbps, 0.0);
    m.rate_d_index = hd.index;
    row.push_back({{i, kAp}, m});
  }

  const RateChoice down = select_downlink_rate(in.rates, snr_d, in.params.delta_db);
  if (!(down.throughput_mbps > eps)) return row;

  for (NodeId j = 1; j <= clients; ++j) {
    if (j == i) continue;
    const UplinkPlan up = plan_uplink(link, in.rates, in.params.delta_db, in.p_max, i, j);
    if (!(up.choice.throughput_mbps > eps)) continue;

    PairMetrics m;
    m.rate_d_index = down.index;
    m.rate_u_index = up.choice.index;
    m.p_up_w = up.p_up_w;
    m.l_d_bits = l_d;
    m.l_u_bits = in.frames.l_u_bits[static_cast<std::size_t>(j)];
    switch (in.params.model) {
      case RateModel::WorstCase:
        m.r_d_mbps = down.throughput_mbps;
        m.r_u_mbps = up.choice.throughput_mbps;
        break;
      case RateModel::Reported: {
        const auto stride = static_cast<std::size_t>(clients) + 1;
        const int idx = in.reported[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(j)];
        m.r_d_mbps = down.throughput_mbps;
        m.r_u_mbps = in.rates.rate_mbps(idx);
        break;
      }
      case RateModel::Oracle: {
        const double sinr_d = sinr_downlink(in.p_max, up.p_up_w, link.gain(kAp, i), link.gain(j, i),
                                            link.noise_w(i));
        m.r_d_mbps = down.rate_mbps * pdr_at(in.rates, down.index, linear_to_db(sinr_d));
        m.r_u_mbps = up.choice.throughput_mbps;
        break;
      }
    }
    m.r_total_mbps = m.r_d_mbps + m.r_u_mbps;
    m.t_s = pair_airtime(m.l_d_bits, m.l_u_bits, m.r_d_mbps, m.r_u_mbps);
    row.push_back({{i, j}, m});
  }
  return row;
}

/// Each client j reports gamma_u^(i,j) for every other client i as a packed
/// index vector; the AP decodes it. Only used by RateModel::Reported.
std::vector<int> collect_reported_rates(const LinkState& link, const RateTable& rates,
                                        double delta_db, double p_max, bool parallel) {
  const int clients = link.client_count();
  const auto stride = static_cast<std::size_t>(clients) + 1;
  std::vector<int> table(stride * stride, 0);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (NodeId j = 1; j <= clients; ++j) {
    std::vector<int> indices;
    indices.reserve(static_cast<std::size_t>(clients - 1));
    for (NodeId i = 1; i <= clients; ++i) {
      if (i == j) continue;
      indices.push_back(plan_uplink(link, rates, delta_db, p_max, i, j).choice.index);
    }
    const std::vector<int> decoded = decode_rate_feedback(encode_rate_feedback(indices, rates), rates);
    std::size_t k = 0;
    for (NodeId i = 1; i <= clients; ++i) {
      if (i == j) continue;
      table[static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(j)] = decoded[k++];
    }
  }
  return table;
}

PairSet build(const LinkState& link, const PowerConfig& power, const RateTable& rates,
              const PairingParams& params, const FrameLengths& frames, bool parallel) {
  if (params.epsilon_mbps < 0.0) throw std::invalid_argument("build_candidate_pairs: epsilon < 0");
  const int clients = link.client_count();
  if (frames.l_d_bits.size() < static_cast<std::size_t>(clients) + 1 ||
      frames.l_u_bits.size() < static_cast<std::size_t>(clients) + 1)
    throw std::invalid_argument("build_candidate_pairs: frame lengths missing for some clients");

  const double p_max = power.max_tx_w();
  std::vector<int> reported;
  if (params.model == RateModel::Reported)
    reported = collect_reported_rates(link, rates, params.delta_db, p_max, parallel);

  const RowInputs in{link, rates, params, frames, p_max, reported};
  std::vector<std::vector<CandidatePair>> rows(static_cast<std::size_t>(clients) + 1);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (NodeId i = 0; i <= clients; ++i) rows[static_cast<std::size_t>(i)] = pairs_for_downlink(in, i);

  std::vector<CandidatePair> all;
  for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
  return PairSet(std::move(all));
}

}  // namespace

PairSet build_candidate_pairs(const LinkState& link, const PowerConfig& power, const RateTable& rates,
                              const PairingParams& params, const FrameLengths& frames) {
  return build(link, power, rates, params, frames, true);
}

PairSet build_candidate_pairs_serial(const LinkState& link, const PowerConfig& power,
                                     const RateTable& rates, const PairingParams& params,
                                     const FrameLengths& frames) {
  return build(link, power, rates, params, frames, false);
}

void write_pair_table(std::ostream& os, const PairSet& pairs) {
  os << "# down up r_d_mbps r_u_mbps t_ms\n";
  for (const CandidatePair& p : pairs.entries()) {
    os << p.key.down << ' ' << p.key.up << ' ' << p.metrics.r_d_mbps << ' ' << p.metrics.r_u_mbps << ' '
       << p.metrics.t_s * 1e3 << '\n';
  }
}

}  // namespace fdmac
