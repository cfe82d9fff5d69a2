#include "fdmac/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace fdmac {

DcfContention::DcfContention(int stations, int cw_min, int cw_max)
    : cw_min_(std::max(cw_min, 1)), cw_max_(std::max(cw_max, std::max(cw_min, 1))) {
  if (stations < 0) throw std::invalid_argument("DcfContention: negative station count");
  cw_.assign(static_cast<std::size_t>(stations), cw_min_);
  counter_.assign(static_cast<std::size_t>(stations), -1);
}

void DcfContention::redraw(int s, Rng& rng) {
  const auto k = static_cast<std::size_t>(s);
  counter_[k] = std::uniform_int_distribution<int>(0, cw_[k] - 1)(rng);
}

DcfContention::Round DcfContention::contend(const std::vector<char>& active, Rng& rng) {
  Round r;
  const int n = station_count();
  int lo = -1;
  for (int s = 0; s < n; ++s) {
    if (!active[static_cast<std::size_t>(s)]) continue;
    if (counter_[static_cast<std::size_t>(s)] < 0) redraw(s, rng);
    const int c = counter_[static_cast<std::size_t>(s)];
    if (lo < 0 || c < lo) lo = c;
  }
  if (lo < 0) return r;
  r.slots = lo;
  for (int s = 0; s < n; ++s) {
    if (!active[static_cast<std::size_t>(s)]) continue;
    int& c = counter_[static_cast<std::size_t>(s)];
    c -= lo;
    if (c == 0) r.winners.push_back(s);
  }
  return r;
}

void DcfContention::on_success(int s, Rng& rng) {
  cw_[static_cast<std::size_t>(s)] = cw_min_;
  redraw(s, rng);
}

void DcfContention::on_collision(int s, Rng& rng) {
  auto& cw = cw_[static_cast<std::size_t>(s)];
  cw = std::min(2 * cw, cw_max_);
  redraw(s, rng);
}

std::vector<GreedyCandidate> greedy_candidates(const LinkState& link, const PowerConfig& power,
                                               const RateTable& rates, double epsilon_mbps) {
  const int clients = link.client_count();
  const double p = power.max_tx_w();
  std::vector<GreedyCandidate> out;
  for (NodeId i = 1; i <= clients; ++i) {
    for (NodeId j = 1; j <= clients; ++j) {
      if (i == j) continue;
      const double sd = sinr_downlink(p, p, link.gain(kAp, i), link.gain(j, i), link.noise_w(i));
      const double su = sinr_uplink(p, p, link.gain(j, kAp), link.self_gain(), link.noise_w(kAp));
      const double rd = effective_throughput(rates, linear_to_db(sd)).throughput_mbps;
      const double ru = effective_throughput(rates, linear_to_db(su)).throughput_mbps;
      if (rd > epsilon_mbps && ru > epsilon_mbps) out.push_back({{i, j}, rd + ru});
    }
  }
  return out;
}

std::vector<PairKey> greedy_pairing(std::vector<GreedyCandidate> candidates) {
  std::sort(candidates.begin(), candidates.end(), [](const GreedyCandidate& a, const GreedyCandidate& b) {
    if (a.value_mbps != b.value_mbps) return a.value_mbps > b.value_mbps;
    return a.key < b.key;
  });
  NodeId top = 0;
  for (const auto& c : candidates) top = std::max({top, c.key.down, c.key.up});
  std::vector<char> used(static_cast<std::size_t>(top) + 1, 0);
  std::vector<PairKey> out;
  for (const auto& c : candidates) {
    auto& ud = used[static_cast<std::size_t>(c.key.down)];
    auto& uu = used[static_cast<std::size_t>(c.key.up)];
    if (ud || uu) continue;
    ud = uu = 1;
    out.push_back(c.key);
  }
  return out;
}

namespace {

double full_power_sinr_db(const MacContext& ctx, NodeId tx, NodeId rx, Rng& rng) {
  return linear_to_db(ctx.p_max_w * ctx.txop_gain(tx, rx, rng) / ctx.link.noise_w(rx));
}

void half_down(const MacContext& ctx, QueueState& q, NodeId i, Rng& rng, TxopOutcome& out) {
  const RateChoice r = effective_throughput(ctx.rates, ctx.snr_db(kAp, i));
  out.down = i;
  out.rate_d_index = r.index;
  out.realized = PairKey{i, 0};
  out.add(TimeCategory::HalfDown, ctx.cfg.header_us + ctx.airtime_us(r.index, ctx.frame_bits) +
                                      ctx.cfg.sifs_us + ctx.cfg.ack_us);
  deliver_down(ctx, q, i, r.index, full_power_sinr_db(ctx, kAp, i, rng), rng, out);
}

void half_up(const MacContext& ctx, QueueState& q, NodeId j, Rng& rng, TxopOutcome& out) {
  const RateChoice r = effective_throughput(ctx.rates, ctx.snr_db(j, kAp));
  out.up = j;
  out.rate_u_index = r.index;
  out.p_up_w = ctx.p_max_w;
  out.realized = PairKey{kAp, j};
  out.add(TimeCategory::HalfUp, ctx.cfg.header_us + ctx.airtime_us(r.index, ctx.frame_bits) +
                                    ctx.cfg.sifs_us + ctx.cfg.ack_us);
  deliver_up(ctx, q, j, r.index, full_power_sinr_db(ctx, j, kAp, rng), rng, out);
}

/// Full-duplex pair at full power on both sides, rates matched to the SINR.
void full_power_pair(const MacContext& ctx, QueueState& q, NodeId i, NodeId j, Rng& rng, TxopOutcome& out) {
  const double p = ctx.p_max_w;
  const LinkState& l = ctx.link;
  const RateChoice rd = effective_throughput(
      ctx.rates, linear_to_db(sinr_downlink(p, p, l.gain(kAp, i), l.gain(j, i), l.noise_w(i))));
  const RateChoice ru = effective_throughput(
      ctx.rates, linear_to_db(sinr_uplink(p, p, l.gain(j, kAp), l.self_gain(), l.noise_w(kAp))));
  const double g0i = ctx.txop_gain(kAp, i, rng);
  const double gji = ctx.txop_gain(j, i, rng);
  const double gj0 = ctx.txop_gain(j, kAp, rng);
  out.down = i;
  out.up = j;
  out.rate_d_index = rd.index;
  out.rate_u_index = ru.index;
  out.p_up_w = p;
  out.realized = PairKey{i, j};
  const double airtime = std::max(ctx.airtime_us(rd.index, ctx.frame_bits), ctx.airtime_us(ru.index, ctx.frame_bits));
  out.add(TimeCategory::FullDuplex, ctx.cfg.header_us + airtime + ctx.cfg.sifs_us + ctx.cfg.ack_us);
  deliver_down(ctx, q, i, rd.index, linear_to_db(sinr_downlink(p, p, g0i, gji, l.noise_w(i))), rng, out);
  deliver_up(ctx, q, j, ru.index, linear_to_db(sinr_uplink(p, p, gj0, l.self_gain(), l.noise_w(kAp))), rng, out);
}

void lose_up(const MacContext& ctx, QueueState& q, NodeId j) {
  auto& r = q.retries_up[static_cast<std::size_t>(j)];
  ++r;
  if (ctx.cfg.retry_limit > 0 && r > ctx.cfg.retry_limit) {
    --q.up[static_cast<std::size_t>(j)];
    r = 0;
  }
}

void lose_down(const MacContext& ctx, QueueState& q, NodeId i) {
  auto& r = q.retries_down[static_cast<std::size_t>(i)];
  ++r;
  if (ctx.cfg.retry_limit > 0 && r > ctx.cfg.retry_limit) {
    --q.down[static_cast<std::size_t>(i)];
    r = 0;
  }
}

NodeId uniform_queued_down(const QueueState& q, const std::vector<char>* exclude, Rng& rng) {
  std::vector<NodeId> c;
  for (NodeId i = 1; i <= q.client_count(); ++i)
    if (q.has_down(i) && !(exclude && (*exclude)[static_cast<std::size_t>(i)])) c.push_back(i);
  if (c.empty()) return 0;
  return c[std::uniform_int_distribution<std::size_t>(0, c.size() - 1)(rng)];
}

double full_rate_airtime(const MacContext& ctx, NodeId tx, NodeId rx) {
  return ctx.airtime_us(effective_throughput(ctx.rates, ctx.snr_db(tx, rx)).index, ctx.frame_bits);
}

}  // namespace

void MaxRatePolicy::begin_epoch(const EpochInputs& in) {
  const SimConfig& cfg = in.ctx.cfg;
  PairingParams params{cfg.delta_db, cfg.epsilon_mbps, RateModel::WorstCase};
  pairs_ = build_candidate_pairs(in.ctx.link, cfg.power(), in.ctx.rates, params,
                                 FrameLengths{in.demands.l_d_bits, in.demands.l_u_bits});
}

TxopOutcome MaxRatePolicy::run_txop(const MacContext& ctx, QueueState& q, Rng& rng) {
  const auto& cfg = ctx.cfg;
  TxopOutcome out;
  out.add(TimeCategory::Contention, cfg.difs_us + cfg.tone_us);
  const NodeId i = uniform_queued_down(q, nullptr, rng);

  if (i == 0) {
    NodeId best = 0;
    double best_r = -1.0;
    for (NodeId j = 1; j <= q.client_count(); ++j) {
      if (!q.has_up(j)) continue;
      const double r = effective_throughput(ctx.rates, ctx.snr_db(j, kAp)).throughput_mbps;
      if (r > best_r) {
        best_r = r;
        best = j;
      }
    }
    if (best != 0) half_up(ctx, q, best, rng, out);
    return out;
  }

  const CandidatePair* best = nullptr;
  for (NodeId j = 1; j <= q.client_count(); ++j) {
    if (j == i || !q.has_up(j)) continue;
    const CandidatePair* c = pairs_.find({i, j});
    if (c && (!best || c->metrics.r_u_mbps > best->metrics.r_u_mbps)) best = c;
  }
  if (!best) {
    half_down(ctx, q, i, rng, out);
    return out;
  }

  const NodeId j = best->key.up;
  const double noise_i = ctx.link.noise_w(i);
  const RateChoice rd = select_downlink_rate(ctx.rates, ctx.snr_db(kAp, i), cfg.delta_db);
  const double g0i = ctx.txop_gain(kAp, i, rng);
  const double gji = ctx.txop_gain(j, i, rng);
  const double gj0 = ctx.txop_gain(j, kAp, rng);
  double est = 1.0;
  if (cfg.ici_estimation_error_db > 0.0)
    est = db_to_linear(std::normal_distribution<double>(0.0, cfg.ici_estimation_error_db)(rng));
  const double p_up = uplink_power_cap(gji * est, noise_i, cfg.delta_db, ctx.p_max_w);
  const RateChoice ru = select_uplink_rate(ctx.rates, p_up, ctx.link.gain(j, kAp), ctx.link.self_gain(),
                                           ctx.p_max_w, ctx.link.noise_w(kAp));
  const double sinr_d = linear_to_db(sinr_downlink(ctx.p_max_w, p_up, g0i, gji, noise_i));
  out.down = i;
  out.up = j;
  out.rate_d_index = rd.index;
  out.rate_u_index = ru.index;
  out.p_up_w = p_up;
  out.realized = PairKey{i, j};
  out.power_checked = true;
  out.snr_d_db = linear_to_db(ctx.p_max_w * g0i / noise_i);
  out.sinr_d_db = sinr_d;
  const double airtime = std::max(ctx.airtime_us(rd.index, ctx.frame_bits), ctx.airtime_us(ru.index, ctx.frame_bits));
  out.add(TimeCategory::FullDuplex, cfg.header_us + airtime + cfg.sifs_us + cfg.ack_us);
  deliver_down(ctx, q, i, rd.index, sinr_d, rng, out);
  deliver_up(ctx, q, j, ru.index,
             linear_to_db(sinr_uplink(p_up, ctx.p_max_w, gj0, ctx.link.self_gain(), ctx.link.noise_w(kAp))), rng,
             out);
  return out;
}

void GreedyPolicy::begin_epoch(const EpochInputs& in) {
  const SimConfig& cfg = in.ctx.cfg;
  pairing_ = greedy_pairing(greedy_candidates(in.ctx.link, cfg.power(), in.ctx.rates, cfg.epsilon_mbps));
  const int clients = in.ctx.link.client_count();
  paired_down_.assign(static_cast<std::size_t>(clients) + 1, 0);
  std::vector<char> paired_up(static_cast<std::size_t>(clients) + 1, 0);
  units_.clear();
  for (const PairKey& k : pairing_) {
    units_.push_back({k.down, k.up, false, k.down});
    paired_down_[static_cast<std::size_t>(k.down)] = 1;
    paired_up[static_cast<std::size_t>(k.up)] = 1;
  }
  units_.push_back({0, 0, true, 0});
  for (NodeId c = 1; c <= clients; ++c)
    if (!paired_up[static_cast<std::size_t>(c)]) units_.push_back({0, c, false, clients + c});
  // Backoff state belongs to the contending node, so it survives re-pairing.
  if (dcf_.station_count() != 2 * clients + 1) dcf_ = DcfContention(2 * clients + 1, cfg.dcf_cw_min, cfg.dcf_cw_max);
}

bool GreedyPolicy::active(const Unit& u, const QueueState& q) const {
  if (u.ap_pool) {
    for (NodeId i = 1; i <= q.client_count(); ++i)
      if (!paired_down_[static_cast<std::size_t>(i)] && q.has_down(i)) return true;
    return false;
  }
  return (u.down != 0 && q.has_down(u.down)) || (u.up != 0 && q.has_up(u.up));
}

TxopOutcome GreedyPolicy::run_txop(const MacContext& ctx, QueueState& q, Rng& rng) {
  const auto& cfg = ctx.cfg;
  TxopOutcome out;
  std::vector<char> act(static_cast<std::size_t>(dcf_.station_count()), 0);
  std::vector<int> unit_of(act.size(), -1);
  for (std::size_t k = 0; k < units_.size(); ++k) {
    const auto st = static_cast<std::size_t>(units_[k].station);
    unit_of[st] = static_cast<int>(k);
    act[st] = active(units_[k], q) ? 1 : 0;
  }
  const DcfContention::Round round = dcf_.contend(act, rng);
  out.add(TimeCategory::Contention, cfg.difs_us + round.slots * cfg.slot_us);
  out.contenders = static_cast<int>(round.winners.size());
  if (round.winners.empty()) return out;

  if (round.winners.size() > 1) {
    out.collision = true;
    double airtime = 0.0;
    for (int s : round.winners) {
      const Unit& u = units_[static_cast<std::size_t>(unit_of[static_cast<std::size_t>(s)])];
      if (u.ap_pool) {
        const NodeId i = uniform_queued_down(q, &paired_down_, rng);
        airtime = std::max(airtime, full_rate_airtime(ctx, kAp, i));
        lose_down(ctx, q, i);
      } else {
        if (u.down != 0 && q.has_down(u.down)) {
          airtime = std::max(airtime, full_rate_airtime(ctx, kAp, u.down));
          lose_down(ctx, q, u.down);
        }
        if (u.up != 0 && q.has_up(u.up)) {
          airtime = std::max(airtime, full_rate_airtime(ctx, u.up, kAp));
          lose_up(ctx, q, u.up);
        }
      }
      dcf_.on_collision(s, rng);
    }
    out.add(TimeCategory::Contention, cfg.header_us + airtime + cfg.sifs_us + cfg.ack_us);
    return out;
  }

  const int s = round.winners[0];
  const Unit& u = units_[static_cast<std::size_t>(unit_of[static_cast<std::size_t>(s)])];
  if (u.ap_pool) {
    half_down(ctx, q, uniform_queued_down(q, &paired_down_, rng), rng, out);
  } else {
    const bool d = u.down != 0 && q.has_down(u.down);
    const bool up = u.up != 0 && q.has_up(u.up);
    if (d && up)
      full_power_pair(ctx, q, u.down, u.up, rng, out);
    else if (d)
      half_down(ctx, q, u.down, rng, out);
    else
      half_up(ctx, q, u.up, rng, out);
  }
  dcf_.on_success(s, rng);
  return out;
}

void RandomPolicy::begin_epoch(const EpochInputs& in) {
  const int stations = in.ctx.link.client_count() + 1;
  if (dcf_.station_count() != stations)
    dcf_ = DcfContention(stations, in.ctx.cfg.dcf_cw_min, in.ctx.cfg.dcf_cw_max);
}

TxopOutcome RandomPolicy::run_txop(const MacContext& ctx, QueueState& q, Rng& rng) {
  const auto& cfg = ctx.cfg;
  TxopOutcome out;
  out.add(TimeCategory::Contention, cfg.difs_us + cfg.tone_us);
  const NodeId i = uniform_queued_down(q, nullptr, rng);

  std::vector<char> act(static_cast<std::size_t>(q.client_count()) + 1, 0);
  for (NodeId j = 1; j <= q.client_count(); ++j) act[static_cast<std::size_t>(j)] = (j != i && q.has_up(j)) ? 1 : 0;
  const DcfContention::Round round = dcf_.contend(act, rng);
  out.contenders = static_cast<int>(round.winners.size());
  const double backoff = round.slots * cfg.slot_us;
  const double p = ctx.p_max_w;
  const LinkState& l = ctx.link;

  if (i == 0) {
    out.add(TimeCategory::Contention, backoff);
    if (round.winners.empty()) return out;
    if (round.winners.size() > 1) {
      out.collision = true;
      double airtime = 0.0;
      for (int j : round.winners) {
        airtime = std::max(airtime, full_rate_airtime(ctx, j, kAp));
        lose_up(ctx, q, j);
        dcf_.on_collision(j, rng);
      }
      out.add(TimeCategory::Contention, cfg.header_us + airtime + cfg.sifs_us + cfg.ack_us);
      return out;
    }
    half_up(ctx, q, round.winners[0], rng, out);
    dcf_.on_success(round.winners[0], rng);
    return out;
  }

  if (round.winners.empty()) {
    const RateChoice r = effective_throughput(ctx.rates, ctx.snr_db(kAp, i));
    out.down = i;
    out.rate_d_index = r.index;
    out.realized = PairKey{i, 0};
    out.add(TimeCategory::HalfDown, cfg.header_us);
    out.add(TimeCategory::Contention, backoff);
    out.add(TimeCategory::HalfDown, ctx.airtime_us(r.index, ctx.frame_bits) + cfg.sifs_us + cfg.ack_us);
    deliver_down(ctx, q, i, r.index, full_power_sinr_db(ctx, kAp, i, rng), rng, out);
    return out;
  }

  if (round.winners.size() == 1) {
    const NodeId j = round.winners[0];
    const RateChoice rd = effective_throughput(
        ctx.rates, linear_to_db(sinr_downlink(p, p, l.gain(kAp, i), l.gain(j, i), l.noise_w(i))));
    if (!(rd.throughput_mbps > cfg.epsilon_mbps)) {
      // No downlink rate survives this interferer: the AP withholds its payload.
      const RateChoice ru = effective_throughput(ctx.rates, ctx.snr_db(j, kAp));
      out.up = j;
      out.rate_u_index = ru.index;
      out.p_up_w = p;
      out.realized = PairKey{kAp, j};
      out.add(TimeCategory::HalfUp, cfg.header_us);
      out.add(TimeCategory::Contention, backoff);
      out.add(TimeCategory::HalfUp, ctx.airtime_us(ru.index, ctx.frame_bits) + cfg.sifs_us + cfg.ack_us);
      deliver_up(ctx, q, j, ru.index, full_power_sinr_db(ctx, j, kAp, rng), rng, out);
      dcf_.on_success(j, rng);
      return out;
    }
    // Same bookkeeping as a Greedy pair, with the backoff between header and payload.
    TxopOutcome fd;
    full_power_pair(ctx, q, i, j, rng, fd);
    fd.segments = out.segments;
    fd.n_segments = out.n_segments;
    const double airtime =
        std::max(ctx.airtime_us(fd.rate_d_index, ctx.frame_bits), ctx.airtime_us(fd.rate_u_index, ctx.frame_bits));
    fd.add(TimeCategory::FullDuplex, cfg.header_us);
    fd.add(TimeCategory::Contention, backoff);
    fd.add(TimeCategory::FullDuplex, airtime + cfg.sifs_us + cfg.ack_us);
    fd.contenders = out.contenders;
    dcf_.on_success(j, rng);
    return fd;
  }

  // Uplink collision: the downlink still goes out under every collider's ICI.
  out.collision = true;
  double ici = 0.0;
  double airtime = 0.0;
  for (int j : round.winners) {
    ici += p * l.gain(j, i);
    airtime = std::max(airtime, full_rate_airtime(ctx, j, kAp));
  }
  const RateChoice rd =
      effective_throughput(ctx.rates, linear_to_db(p * l.gain(kAp, i) / (l.noise_w(i) + ici)));
  double ici_txop = 0.0;
  for (int j : round.winners) ici_txop += p * ctx.txop_gain(j, i, rng);
  const double g0i = ctx.txop_gain(kAp, i, rng);
  if (!(rd.throughput_mbps > cfg.epsilon_mbps)) {
    out.add(TimeCategory::Contention, cfg.header_us + backoff + airtime + cfg.sifs_us + cfg.ack_us);
    for (int j : round.winners) {
      lose_up(ctx, q, j);
      dcf_.on_collision(j, rng);
    }
    return out;
  }
  airtime = std::max(airtime, ctx.airtime_us(rd.index, ctx.frame_bits));
  out.down = i;
  out.rate_d_index = rd.index;
  out.add(TimeCategory::HalfDown, cfg.header_us);
  out.add(TimeCategory::Contention, backoff);
  out.add(TimeCategory::HalfDown, airtime + cfg.sifs_us + cfg.ack_us);
  for (int j : round.winners) {
    lose_up(ctx, q, j);
    dcf_.on_collision(j, rng);
  }
  deliver_down(ctx, q, i, rd.index, linear_to_db(p * g0i / (l.noise_w(i) + ici_txop)), rng, out);
  return out;
}

void HalfDuplexPolicy::begin_epoch(const EpochInputs& in) {
  const int stations = in.ctx.link.client_count() + 1;
  if (dcf_.station_count() != stations)
    dcf_ = DcfContention(stations, in.ctx.cfg.dcf_cw_min, in.ctx.cfg.dcf_cw_max);
}

TxopOutcome HalfDuplexPolicy::run_txop(const MacContext& ctx, QueueState& q, Rng& rng) {
  const auto& cfg = ctx.cfg;
  TxopOutcome out;
  std::vector<char> act(static_cast<std::size_t>(q.client_count()) + 1, 0);
  act[0] = q.any_down() ? 1 : 0;
  for (NodeId j = 1; j <= q.client_count(); ++j) act[static_cast<std::size_t>(j)] = q.has_up(j) ? 1 : 0;
  const DcfContention::Round round = dcf_.contend(act, rng);
  out.add(TimeCategory::Contention, cfg.difs_us + round.slots * cfg.slot_us);
  out.contenders = static_cast<int>(round.winners.size());
  if (round.winners.empty()) return out;

  if (round.winners.size() > 1) {
    out.collision = true;
    double airtime = 0.0;
    for (int s : round.winners) {
      if (s == kAp) {
        const NodeId i = uniform_queued_down(q, nullptr, rng);
        airtime = std::max(airtime, full_rate_airtime(ctx, kAp, i));
        lose_down(ctx, q, i);
      } else {
        airtime = std::max(airtime, full_rate_airtime(ctx, s, kAp));
        lose_up(ctx, q, s);
      }
      dcf_.on_collision(s, rng);
    }
    out.add(TimeCategory::Contention, cfg.header_us + airtime + cfg.sifs_us + cfg.ack_us);
    return out;
  }

  const int s = round.winners[0];
  if (s == kAp)
    half_down(ctx, q, uniform_queued_down(q, nullptr, rng), rng, out);
  else
    half_up(ctx, q, s, rng, out);
  dcf_.on_success(s, rng);
  return out;
}

std::unique_ptr<SchemePolicy> make_policy(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed:
      return std::make_unique<ProbabilisticPolicy>(RateModel::Reported);
    case Scheme::Oracle:
      return std::make_unique<ProbabilisticPolicy>(RateModel::Oracle);
    case Scheme::MaxRate:
      return std::make_unique<MaxRatePolicy>();
    case Scheme::Greedy:
      return std::make_unique<GreedyPolicy>();
    case Scheme::Random:
      return std::make_unique<RandomPolicy>();
    case Scheme::HalfDuplex:
      return std::make_unique<HalfDuplexPolicy>();
  }
  throw std::invalid_argument("make_policy: unknown scheme");
}

}  // namespace fdmac
