#include "fdmac/mac.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "fdmac/baselines.hpp"

namespace fdmac {

QueueState::QueueState(int n_clients) {
  const auto n = static_cast<std::size_t>(n_clients) + 1;
  down.assign(n, 0);
  up.assign(n, 0);
  arrived_down.assign(n, 0);
  arrived_up.assign(n, 0);
  retries_down.assign(n, 0);
  retries_up.assign(n, 0);
}

bool QueueState::any_down() const {
  return std::any_of(down.begin() + 1, down.end(), [](std::uint64_t v) { return v > 0; });
}

bool QueueState::any_up() const {
  return std::any_of(up.begin() + 1, up.end(), [](std::uint64_t v) { return v > 0; });
}

void QueueState::reset_epoch_counters() {
  std::fill(arrived_down.begin(), arrived_down.end(), 0);
  std::fill(arrived_up.begin(), arrived_up.end(), 0);
}

void step_arrivals(QueueState& queues, std::span<const double> lambda_d, std::span<const double> lambda_u,
                   double interval_s, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int clients = queues.client_count();
  for (int c = 1; c <= clients; ++c) {
    const auto k = static_cast<std::size_t>(c);
    const double pd = std::clamp(lambda_d[k] * interval_s, 0.0, 1.0);
    const double pu = std::clamp(lambda_u[k] * interval_s, 0.0, 1.0);
    // Always two draws per client so every scheme sees the same arrivals.
    const double ud = u(rng);
    const double uu = u(rng);
    if (ud < pd) {
      ++queues.down[k];
      ++queues.arrived_down[k];
    }
    if (uu < pu) {
      ++queues.up[k];
      ++queues.arrived_up[k];
    }
  }
}

void TxopOutcome::add(TimeCategory c, double us) {
  if (us <= 0.0) return;
  if (n_segments > 0 && segments[static_cast<std::size_t>(n_segments - 1)].category == c) {
    segments[static_cast<std::size_t>(n_segments - 1)].us += us;
    return;
  }
  if (n_segments == static_cast<int>(segments.size())) {
    segments.back().us += us;
    return;
  }
  segments[static_cast<std::size_t>(n_segments++)] = {c, us};
}

double TxopOutcome::duration_us() const {
  double s = 0.0;
  for (int k = 0; k < n_segments; ++k) s += segments[static_cast<std::size_t>(k)].us;
  return s;
}

double TxopOutcome::time_in(TimeCategory c) const {
  double s = 0.0;
  for (int k = 0; k < n_segments; ++k)
    if (segments[static_cast<std::size_t>(k)].category == c) s += segments[static_cast<std::size_t>(k)].us;
  return s;
}

double MacContext::snr_db(NodeId from, NodeId to) const {
  return linear_to_db(p_max_w * link.gain(from, to) / link.noise_w(to));
}

double MacContext::airtime_us(int rate_index, double bits) const {
  return bits / rates.rate_mbps(rate_index);
}

double MacContext::txop_gain(NodeId a, NodeId b, Rng& rng) const {
  if (!cfg.fading_per_packet) return link.gain(a, b);
  std::exponential_distribution<double> fade(1.0);
  return mean_link.gain(a, b) * fade(rng);
}

namespace {

void fail_frame(std::uint64_t& queue, int& retries, int limit) {
  ++retries;
  if (limit > 0 && retries > limit) {
    --queue;
    retries = 0;
  }
}

void fail_up(const MacContext& ctx, QueueState& q, NodeId j) {
  const auto k = static_cast<std::size_t>(j);
  fail_frame(q.up[k], q.retries_up[k], ctx.cfg.retry_limit);
}

}  // namespace

bool deliver_down(const MacContext& ctx, QueueState& q, NodeId i, int rate_index, double sinr_db, Rng& rng,
                  TxopOutcome& out) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto k = static_cast<std::size_t>(i);
  const bool ok = u(rng) < pdr_at(ctx.rates, rate_index, sinr_db);
  if (ok) {
    --q.down[k];
    q.retries_down[k] = 0;
    out.bits_down += ctx.frame_bits;
    out.down_delivered = true;
  } else {
    fail_frame(q.down[k], q.retries_down[k], ctx.cfg.retry_limit);
  }
  return ok;
}

bool deliver_up(const MacContext& ctx, QueueState& q, NodeId j, int rate_index, double sinr_db, Rng& rng,
                TxopOutcome& out) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto k = static_cast<std::size_t>(j);
  const bool ok = u(rng) < pdr_at(ctx.rates, rate_index, sinr_db);
  if (ok) {
    --q.up[k];
    q.retries_up[k] = 0;
    out.bits_up += ctx.frame_bits;
    out.up_delivered = true;
  } else {
    fail_frame(q.up[k], q.retries_up[k], ctx.cfg.retry_limit);
  }
  return ok;
}

ToneResult tone_contention(int n_aps, int subchannels, Rng& rng) {
  ToneResult r;
  if (n_aps <= 1) return r;
  std::uniform_int_distribution<int> pick(0, std::max(subchannels, 1) - 1);
  std::vector<int> choice(static_cast<std::size_t>(n_aps));
  for (r.rounds = 1;; ++r.rounds) {
    for (int& c : choice) c = pick(rng);
    const int lo = *std::min_element(choice.begin(), choice.end());
    if (std::count(choice.begin(), choice.end(), lo) == 1) {
      r.winner = static_cast<int>(std::find(choice.begin(), choice.end(), lo) - choice.begin());
      return r;
    }
  }
}

namespace {

/// Half-duplex transmission outside the access table: a short random
/// backoff, full power, best rate for the epoch SNR.
TxopOutcome fallback_txop(const MacContext& ctx, QueueState& q, Rng& rng, TxopOutcome out) {
  const auto& cfg = ctx.cfg;
  out.fallback = true;
  std::vector<NodeId> dirs;  // positive: downlink, negative: uplink
  for (int c = 1; c <= q.client_count(); ++c) {
    if (q.has_down(c)) dirs.push_back(c);
    if (q.has_up(c)) dirs.push_back(-c);
  }
  if (dirs.empty()) return out;
  const NodeId pick = dirs[std::uniform_int_distribution<std::size_t>(0, dirs.size() - 1)(rng)];
  const int slots = std::uniform_int_distribution<int>(0, std::max(cfg.dcf_cw_min, 1) - 1)(rng);
  out.add(TimeCategory::Contention, slots * cfg.slot_us);

  const bool is_down = pick > 0;
  const NodeId c = is_down ? pick : -pick;
  const NodeId tx = is_down ? kAp : c;
  const NodeId rx = is_down ? c : kAp;
  const RateChoice rc = effective_throughput(ctx.rates, ctx.snr_db(tx, rx));
  const double g = ctx.txop_gain(tx, rx, rng);
  const double sinr = linear_to_db(ctx.p_max_w * g / ctx.link.noise_w(rx));
  const TimeCategory cat = is_down ? TimeCategory::HalfDown : TimeCategory::HalfUp;
  out.add(cat, cfg.header_us + ctx.airtime_us(rc.index, ctx.frame_bits) + cfg.sifs_us + cfg.ack_us);
  if (is_down) {
    out.down = c;
    out.rate_d_index = rc.index;
    deliver_down(ctx, q, c, rc.index, sinr, rng, out);
  } else {
    out.up = c;
    out.rate_u_index = rc.index;
    out.p_up_w = ctx.p_max_w;
    deliver_up(ctx, q, c, rc.index, sinr, rng, out);
  }
  return out;
}

double estimation_factor(const MacContext& ctx, Rng& rng) {
  const double sigma_db = ctx.cfg.ici_estimation_error_db;
  if (sigma_db <= 0.0) return 1.0;
  std::normal_distribution<double> n(0.0, sigma_db);
  return db_to_linear(n(rng));
}

}  // namespace

TxopOutcome run_txop(const MacContext& ctx, const AccessTable& table, const PairSet& pairs, QueueState& q,
                     Rng& rng) {
  (void)pairs;
  const auto& cfg = ctx.cfg;
  TxopOutcome out;
  const ToneResult tone = tone_contention(cfg.n_aps, cfg.tone_subchannels, rng);
  out.add(TimeCategory::Contention, tone.rounds * (cfg.difs_us + cfg.tone_us));

  if (table.idle()) return fallback_txop(ctx, q, rng, out);

  // Downlink endpoint, restricted to endpoints with queued traffic.
  const int clients = std::min(q.client_count(), table.client_count());
  std::vector<double> weight(static_cast<std::size_t>(clients) + 1, 0.0);
  if (table.p_d(kAp) > 0.0) {
    for (const AccessEntry& e : table.entries(kAp))
      if (e.up != 0 && q.has_up(e.up)) {
        weight[0] = table.p_d(kAp);
        break;
      }
  }
  for (int i = 1; i <= clients; ++i)
    if (table.p_d(i) > 0.0 && q.has_down(i)) weight[static_cast<std::size_t>(i)] = table.p_d(i);
  double total = 0.0;
  for (double w : weight) total += w;
  if (total <= 0.0) return fallback_txop(ctx, q, rng, out);

  NodeId i = 0;
  {
    const double x = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    NodeId last = 0;
    for (int k = 0; k <= clients; ++k) {
      if (weight[static_cast<std::size_t>(k)] <= 0.0) continue;
      last = k;
      acc += weight[static_cast<std::size_t>(k)];
      if (x < acc) break;
    }
    i = last;
  }

  const auto& entries = table.entries(i);
  int w0 = INT_MAX;
  int max_cw = 1;
  for (const AccessEntry& e : entries) {
    max_cw = std::max(max_cw, e.cw);
    if (e.up == 0) w0 = std::uniform_int_distribution<int>(1, e.cw)(rng);
  }
  struct Contender {
    int w;
    NodeId j;
  };
  std::vector<Contender> contenders;
  for (const AccessEntry& e : entries) {
    if (e.up == 0 || !q.has_up(e.up)) continue;
    const int w = std::uniform_int_distribution<int>(1, e.cw)(rng);
    if (w <= w0) contenders.push_back({w, e.up});
  }
  out.contenders = static_cast<int>(contenders.size());

  int w_min = INT_MAX;
  for (const Contender& c : contenders) w_min = std::min(w_min, c.w);
  std::vector<NodeId> winners;
  for (const Contender& c : contenders)
    if (c.w == w_min) winners.push_back(c.j);
  const int wait_slots = !contenders.empty() ? w_min : (w0 != INT_MAX ? w0 : max_cw);
  const double backoff_us = wait_slots * cfg.slot_us;
  const double tail_us = cfg.sifs_us + cfg.ack_us;

  if (i != kAp) {
    const double snr_d_epoch = ctx.snr_db(kAp, i);
    const RateChoice rd = table.has_full_duplex(i) ? select_downlink_rate(ctx.rates, snr_d_epoch, cfg.delta_db)
                                                   : effective_throughput(ctx.rates, snr_d_epoch);
    const double noise_i = ctx.link.noise_w(i);
    const double g0i = ctx.txop_gain(kAp, i, rng);
    const double snr_d = ctx.p_max_w * g0i / noise_i;
    double airtime = ctx.airtime_us(rd.index, ctx.frame_bits);
    out.down = i;
    out.rate_d_index = rd.index;

    if (winners.empty()) {
      out.add(TimeCategory::HalfDown, cfg.header_us);
      out.add(TimeCategory::Contention, backoff_us);
      out.add(TimeCategory::HalfDown, airtime + tail_us);
      out.realized = PairKey{i, 0};
      deliver_down(ctx, q, i, rd.index, linear_to_db(snr_d), rng, out);
      return out;
    }

    // Uplink power is set from the overheard ICI gain.
    double ici_w = 0.0;
    std::vector<RateChoice> ru(winners.size());
    std::vector<double> p_up(winners.size());
    std::vector<double> gj0(winners.size());
    for (std::size_t k = 0; k < winners.size(); ++k) {
      const NodeId j = winners[k];
      const double gji = ctx.txop_gain(j, i, rng);
      gj0[k] = ctx.txop_gain(j, kAp, rng);
      p_up[k] = uplink_power_cap(gji * estimation_factor(ctx, rng), noise_i, cfg.delta_db, ctx.p_max_w);
      ru[k] = select_uplink_rate(ctx.rates, p_up[k], ctx.link.gain(j, kAp), ctx.link.self_gain(), ctx.p_max_w,
                                 ctx.link.noise_w(kAp));
      ici_w += p_up[k] * gji;
      airtime = std::max(airtime, ctx.airtime_us(ru[k].index, ctx.frame_bits));
    }
    const double sinr_d_db = linear_to_db(ctx.p_max_w * g0i / (noise_i + ici_w));

    if (winners.size() > 1) {
      out.collision = true;
      out.add(TimeCategory::HalfDown, cfg.header_us);
      out.add(TimeCategory::Contention, backoff_us);
      out.add(TimeCategory::HalfDown, airtime + tail_us);
      for (NodeId j : winners) fail_up(ctx, q, j);
      deliver_down(ctx, q, i, rd.index, sinr_d_db, rng, out);
      return out;
    }

    const NodeId j = winners[0];
    out.up = j;
    out.rate_u_index = ru[0].index;
    out.p_up_w = p_up[0];
    out.realized = PairKey{i, j};
    out.power_checked = true;
    out.snr_d_db = linear_to_db(snr_d);
    out.sinr_d_db = sinr_d_db;
    out.add(TimeCategory::FullDuplex, cfg.header_us);
    out.add(TimeCategory::Contention, backoff_us);
    out.add(TimeCategory::FullDuplex, airtime + tail_us);
    const double sinr_u_db = linear_to_db(
        sinr_uplink(p_up[0], ctx.p_max_w, gj0[0], ctx.link.self_gain(), ctx.link.noise_w(kAp)));
    deliver_down(ctx, q, i, rd.index, sinr_d_db, rng, out);
    deliver_up(ctx, q, j, ru[0].index, sinr_u_db, rng, out);
    return out;
  }

  // Uplink-only opportunity: clients transmit at full power, AP silent.
  out.add(TimeCategory::Contention, backoff_us);
  if (winners.empty()) return out;
  const double noise_ap = ctx.link.noise_w(kAp);
  if (winners.size() > 1) {
    out.collision = true;
    double airtime = 0.0;
    for (NodeId j : winners) {
      const RateChoice r = effective_throughput(ctx.rates, ctx.snr_db(j, kAp));
      airtime = std::max(airtime, ctx.airtime_us(r.index, ctx.frame_bits));
      fail_up(ctx, q, j);
    }
    out.add(TimeCategory::Contention, cfg.header_us + airtime + tail_us);
    return out;
  }
  const NodeId j = winners[0];
  const RateChoice r = effective_throughput(ctx.rates, ctx.snr_db(j, kAp));
  const double g = ctx.txop_gain(j, kAp, rng);
  out.up = j;
  out.rate_u_index = r.index;
  out.p_up_w = ctx.p_max_w;
  out.realized = PairKey{kAp, j};
  out.add(TimeCategory::HalfUp, cfg.header_us + ctx.airtime_us(r.index, ctx.frame_bits) + tail_us);
  deliver_up(ctx, q, j, r.index, linear_to_db(ctx.p_max_w * g / noise_ap), rng, out);
  return out;
}

double SimReport::tput_down_mbps() const {
  const double d = duration_s();
  return d > 0.0 ? bits_down / d / 1e6 : 0.0;
}

double SimReport::tput_up_mbps() const {
  const double d = duration_s();
  return d > 0.0 ? bits_up / d / 1e6 : 0.0;
}

double SimReport::collision_prob() const {
  return txops > 0 ? static_cast<double>(collisions) / static_cast<double>(txops) : 0.0;
}

namespace {
double category(const TimeBreakdown& t, TimeCategory c) { return t[static_cast<std::size_t>(c)]; }
}  // namespace

double SimReport::fd_time_frac() const {
  const double fd = category(time_us, TimeCategory::FullDuplex);
  const double hd = category(time_us, TimeCategory::HalfDown) + category(time_us, TimeCategory::HalfUp);
  return fd + hd > 0.0 ? fd / (fd + hd) : 0.0;
}

double SimReport::hd_time_frac() const {
  const double fd = category(time_us, TimeCategory::FullDuplex);
  const double hd = category(time_us, TimeCategory::HalfDown) + category(time_us, TimeCategory::HalfUp);
  return fd + hd > 0.0 ? hd / (fd + hd) : 0.0;
}

double SimReport::mean_contention_us() const {
  return txops > 0 ? contention_us / static_cast<double>(txops) : 0.0;
}

void ProbabilisticPolicy::begin_epoch(const EpochInputs& in) {
  const SimConfig& cfg = in.ctx.cfg;
  AssignConfig acfg;
  acfg.pairing = {cfg.delta_db, cfg.epsilon_mbps, model_};
  acfg.cw_max = cfg.cw_max;
  acfg.power = cfg.power();
  acfg.rates = in.ctx.rates;
  assignment_ = assign_epoch(in.demands, in.ctx.link, acfg);
}

TxopOutcome ProbabilisticPolicy::run_txop(const MacContext& ctx, QueueState& queues, Rng& rng) {
  return fdmac::run_txop(ctx, assignment_.table, assignment_.pairs, queues, rng);
}

Replica::Replica(const SimConfig& cfg)
    : Replica(cfg, generate_topology(cfg.n_clients, cfg.area_side_m, cfg.seed)) {}

Replica::Replica(const SimConfig& cfg, Topology topology)
    : Replica(cfg, std::move(topology), make_policy(cfg.scheme)) {}

Replica::Replica(const SimConfig& cfg, Topology topology, std::unique_ptr<SchemePolicy> policy)
    : cfg_(cfg), topo_(std::move(topology)), policy_(std::move(policy)) {
  cfg_.validate();
  if (topo_.client_count() != cfg_.n_clients)
    throw std::invalid_argument("Replica: topology does not match n_clients");
  rates_ = cfg_.rate_table();
  mean_link_ = mean_link_state(topo_, cfg_.channel(), cfg_.power());
  queues_ = QueueState(cfg_.n_clients);
  traffic_rng_ = make_rng(cfg_.seed, Stream::Traffic);
  mac_rng_ = make_rng(cfg_.seed, Stream::Mac);

  const auto n = static_cast<std::size_t>(cfg_.n_clients) + 1;
  lambda_d_.assign(n, cfg_.arrival_fps);
  lambda_u_.assign(n, cfg_.arrival_fps);
  if (cfg_.heterogeneous()) {
    Rng demand = make_rng(cfg_.seed, Stream::Demand);
    std::uniform_real_distribution<double> u(cfg_.arrival_lo_fps, cfg_.arrival_hi_fps);
    for (std::size_t k = 1; k < n; ++k) lambda_d_[k] = lambda_u_[k] = u(demand);
  }
  if (!cfg_.lambda_d_fps.empty()) lambda_d_ = cfg_.lambda_d_fps;
  if (!cfg_.lambda_u_fps.empty()) lambda_u_ = cfg_.lambda_u_fps;
  lambda_d_[0] = lambda_u_[0] = 0.0;
  next_arrival_us_ = cfg_.arrival_interval_ms * 1e3;
  measured_d_ = lambda_d_;
  measured_u_ = lambda_u_;

  report_.scheme = cfg_.scheme;
  report_.n_clients = cfg_.n_clients;
  report_.seed = cfg_.seed;
  report_.epoch_s = cfg_.epoch_s();
  report_.clients.assign(n, ClientStats{});
  report_.min_fd_margin_db = std::numeric_limits<double>::max();
}

DemandSnapshot Replica::current_demands() const {
  DemandSnapshot d = DemandSnapshot::uniform(cfg_.n_clients, 0.0, cfg_.frame_bits(), cfg_.epoch_s());
  d.lambda_d = measured_d_;
  d.lambda_u = measured_u_;
  return d;
}

void Replica::advance_arrivals(double until_us) {
  const double interval_us = cfg_.arrival_interval_ms * 1e3;
  while (next_arrival_us_ <= until_us) {
    step_arrivals(queues_, lambda_d_, lambda_u_, cfg_.arrival_interval_ms * 1e-3, traffic_rng_);
    ++arrival_index_;
    next_arrival_us_ = static_cast<double>(arrival_index_ + 1) * interval_us;
  }
}

void Replica::record(const TxopOutcome& out, EpochStats& st) {
  ++st.txops;
  if (out.collision) ++st.collisions;
  st.contention_us += out.time_in(TimeCategory::Contention);
  st.bits_down += out.bits_down;
  st.bits_up += out.bits_up;
  if (out.power_checked) {
    ++st.fd_checks;
    const double margin = out.sinr_d_db - (out.snr_d_db - cfg_.delta_db);
    if (margin < -1e-9) ++st.fd_violations;
    report_.min_fd_margin_db = std::min(report_.min_fd_margin_db, margin);
  }
  if (out.down != 0) {
    auto& c = report_.clients[static_cast<std::size_t>(out.down)];
    ++c.downlink_tx;
    c.bits_down += out.bits_down;
  }
  if (out.up != 0) {
    auto& c = report_.clients[static_cast<std::size_t>(out.up)];
    ++c.uplink_tx;
    c.bits_up += out.bits_up;
  }
  if (out.realized) report_.pairs[*out.realized].realized += 1.0;
  if (out.fallback) ++report_.fallback_txops;
  if (observer_) observer_(out);
}

EpochStats Replica::run_epoch() {
  const double T = cfg_.epoch_ms * 1e3;
  const double start = static_cast<double>(epoch_) * T;
  Rng channel_rng = make_rng(cfg_.seed, Stream::Channel, static_cast<std::uint64_t>(epoch_));
  link_ = draw_link_state(topo_, cfg_.channel(), cfg_.power(), channel_rng);
  const MacContext ctx{cfg_, rates_, link_, mean_link_, cfg_.power().max_tx_w(), cfg_.frame_bits()};

  const DemandSnapshot demands = current_demands();
  policy_->begin_epoch({ctx, demands, epoch_});
  if (const EpochAssignment* a = policy_->assignment()) {
    ++report_.lp_solves;
    report_.lp_iterations += a->allocation.lp_iterations;
    report_.relaxed_shares += a->relaxed_shares;
    if (access_dump_) {
      *access_dump_ << "# epoch " << epoch_ << '\n';
      write_access_table(*access_dump_, *a);
    }
  }
  const AccessTable* table = policy_->access_table();
  queues_.reset_epoch_counters();

  EpochStats st;
  double t = 0.0;
  for (std::size_t c = 0; c < carry_.size(); ++c) {
    st.time_us[c] += carry_[c];
    t += carry_[c];
  }
  carry_ = {};
  long table_txops = 0;

  while (t < T) {
    advance_arrivals(start + t);
    if (queues_.empty()) {
      const double next = std::min(next_arrival_us_ - start, T);
      st.time_us[static_cast<std::size_t>(TimeCategory::Idle)] += next - t;
      t = next;
      continue;
    }
    const TxopOutcome out = policy_->run_txop(ctx, queues_, mac_rng_);
    record(out, st);
    if (table && !table->idle() && !out.fallback) ++table_txops;
    for (int k = 0; k < out.n_segments; ++k) {
      const TimeSegment& seg = out.segments[static_cast<std::size_t>(k)];
      const auto c = static_cast<std::size_t>(seg.category);
      const double room = T - t;
      if (seg.us <= room) {
        st.time_us[c] += seg.us;
        t += seg.us;
      } else {
        st.time_us[c] += std::max(room, 0.0);
        carry_[c] += seg.us - std::max(room, 0.0);
        t = T;
      }
    }
  }
  advance_arrivals(start + T);

  const auto n = static_cast<std::size_t>(cfg_.n_clients) + 1;
  for (std::size_t k = 1; k < n; ++k) {
    measured_d_[k] = static_cast<double>(queues_.arrived_down[k]) / cfg_.epoch_s();
    measured_u_[k] = static_cast<double>(queues_.arrived_up[k]) / cfg_.epoch_s();
  }

  if (table && !table->idle() && table_txops > 0) {
    for (NodeId d = 0; d <= table->client_count(); ++d)
      for (const AccessEntry& e : table->entries(d))
        report_.pairs[PairKey{d, e.up}].assigned += e.p * static_cast<double>(table_txops);
  }
  report_.table_txops += table_txops;

  report_.bits_down += st.bits_down;
  report_.bits_up += st.bits_up;
  for (std::size_t c = 0; c < st.time_us.size(); ++c) report_.time_us[c] += st.time_us[c];
  report_.txops += st.txops;
  report_.collisions += st.collisions;
  report_.contention_us += st.contention_us;
  report_.fd_checks += st.fd_checks;
  report_.fd_violations += st.fd_violations;
  report_.epoch_stats.push_back(st);
  ++report_.epochs;
  ++epoch_;
  return st;
}

void Replica::run() {
  while (epoch_ < cfg_.epochs) run_epoch();
}

EpochStats run_epoch(Replica& replica) { return replica.run_epoch(); }

SimReport run_simulation(const SimConfig& cfg) {
  Replica r(cfg);
  r.run();
  return r.report();
}

std::vector<SimReport> run_simulations(const std::vector<SimConfig>& configs) {
  for (const SimConfig& c : configs) c.validate();
  std::vector<SimReport> out(configs.size());
  const auto n = static_cast<long>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = run_simulation(configs[static_cast<std::size_t>(k)]);
  return out;
}

std::vector<SimReport> run_simulations_serial(const std::vector<SimConfig>& configs) {
  std::vector<SimReport> out;
  out.reserve(configs.size());
  for (const SimConfig& c : configs) out.push_back(run_simulation(c));
  return out;
}

}  // namespace fdmac
