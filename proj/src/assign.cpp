#include "fdmac/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fdmac/log.hpp"

namespace fdmac {

void DemandSnapshot::validate() const {
  const std::size_t n = lambda_d.size();
  if (n < 2 || lambda_u.size() != n || l_d_bits.size() != n || l_u_bits.size() != n)
    throw std::invalid_argument("DemandSnapshot: per-client vectors must all have C+1 entries");
  if (!(epoch_s > 0.0)) throw std::invalid_argument("DemandSnapshot: epoch duration must be positive");
  for (std::size_t i = 1; i < n; ++i) {
    if (lambda_d[i] < 0.0 || lambda_u[i] < 0.0)
      throw std::invalid_argument("DemandSnapshot: arrival rates must be non-negative");
  }
}

DemandSnapshot DemandSnapshot::uniform(int n_clients, double lambda_fps, double frame_bits, double epoch_s) {
  const auto n = static_cast<std::size_t>(n_clients) + 1;
  DemandSnapshot d;
  d.lambda_d.assign(n, lambda_fps);
  d.lambda_u.assign(n, lambda_fps);
  d.l_d_bits.assign(n, frame_bits);
  d.l_u_bits.assign(n, frame_bits);
  d.lambda_d[0] = d.lambda_u[0] = 0.0;
  d.epoch_s = epoch_s;
  return d;
}

double mean_lowest_rate_airtime(const DemandSnapshot& demands, const RateTable& rates) {
  const int clients = demands.client_count();
  double sum = 0.0;
  for (int i = 1; i <= clients; ++i) {
    sum += demands.l_d_bits[static_cast<std::size_t>(i)] + demands.l_u_bits[static_cast<std::size_t>(i)];
  }
  return sum / (2.0 * clients) / (rates.rate_mbps(0) * 1e6);
}

MinShares min_fair_shares(const DemandSnapshot& demands, double t_bar_s) {
  demands.validate();
  if (!(t_bar_s > 0.0)) throw std::invalid_argument("min_fair_shares: t_bar must be positive");
  const int clients = demands.client_count();
  const double T = demands.epoch_s;
  const auto n = static_cast<std::size_t>(clients) + 1;

  MinShares shares;
  shares.eta_d.assign(n, 0.0);
  shares.eta_u.assign(n, 0.0);

  // Residual demand per direction; slot k < n is downlink k, slot n + k uplink k.
  std::vector<double> residual(2 * n, 0.0);
  std::vector<std::size_t> unserved;
  double scale = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    residual[i] = demands.lambda_d[i] * T;
    residual[n + i] = demands.lambda_u[i] * T;
    scale = std::max({scale, residual[i], residual[n + i]});
  }
  for (std::size_t k = 0; k < 2 * n; ++k)
    if (residual[k] > 0.0) unserved.push_back(k);
  const double zero = 1e-12 * std::max(1.0, std::max(scale, T / t_bar_s));

  double granted = 0.0;  // sum of eta
  while (!unserved.empty()) {
    const double left = (T - granted * t_bar_s) / (t_bar_s * static_cast<double>(unserved.size()));
    double smallest = std::numeric_limits<double>::infinity();
    for (const std::size_t k : unserved) smallest = std::min(smallest, residual[k]);
    const double step = std::min(smallest, left);
    if (step <= zero) break;

    std::vector<std::size_t> still;
    for (const std::size_t k : unserved) {
      double& eta = k < n ? shares.eta_d[k] : shares.eta_u[k - n];
      eta += step;
      residual[k] -= step;
      granted += step;
      if (residual[k] > zero) {
        still.push_back(k);
      } else {
        // snap to the exact demand so eta <= lambda*T holds bit-for-bit
        eta = k < n ? demands.lambda_d[k] * T : demands.lambda_u[k - n] * T;
        residual[k] = 0.0;
      }
    }
    unserved.swap(still);
  }
  return shares;
}

double Allocation::total() const { return std::accumulate(n.begin(), n.end(), 0.0); }

namespace {

double pair_bits(PairKey key, const DemandSnapshot& d) {
  double l = 0.0;
  if (key.down != 0) l += d.l_d_bits[static_cast<std::size_t>(key.down)];
  if (key.up != 0) l += d.l_u_bits[static_cast<std::size_t>(key.up)];
  return l;
}

}  // namespace

double allocation_throughput_bps(const PairSet& pairs, const DemandSnapshot& demands,
                                 const std::vector<double>& n) {
  double bits = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) bits += n[k] * pair_bits(pairs[k].key, demands);
  return bits / demands.epoch_s;
}

Allocation solve_assignment(const PairSet& pairs, const DemandSnapshot& demands, const MinShares& shares,
                            const lp::Options& options) {
  demands.validate();
  const int clients = demands.client_count();
  const auto nc = static_cast<std::size_t>(clients) + 1;
  if (shares.eta_d.size() != nc || shares.eta_u.size() != nc)
    throw std::invalid_argument("solve_assignment: shares do not match the client count");
  const double T = demands.epoch_s;

  Allocation out;
  out.keys.reserve(pairs.size());
  out.n.assign(pairs.size(), 0.0);

  std::vector<std::vector<int>> down_vars(nc), up_vars(nc);
  std::vector<std::size_t> var_pair;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const PairKey key = pairs[k].key;
    out.keys.push_back(key);
    if (key.down > clients || key.up > clients || key.down < 0 || key.up < 0)
      throw std::invalid_argument("solve_assignment: pair refers to an unknown client");
    // a zero demand cap pins the variable to 0
    if (key.down != 0 && demands.lambda_d[static_cast<std::size_t>(key.down)] <= 0.0) continue;
    if (key.up != 0 && demands.lambda_u[static_cast<std::size_t>(key.up)] <= 0.0) continue;
    const int v = static_cast<int>(var_pair.size());
    var_pair.push_back(k);
    if (key.down != 0) down_vars[static_cast<std::size_t>(key.down)].push_back(v);
    if (key.up != 0) up_vars[static_cast<std::size_t>(key.up)].push_back(v);
  }

  for (std::size_t i = 1; i < nc; ++i) {
    if (shares.eta_d[i] > 0.0 && down_vars[i].empty()) out.uncovered_down.push_back(static_cast<NodeId>(i));
    if (shares.eta_u[i] > 0.0 && up_vars[i].empty()) out.uncovered_up.push_back(static_cast<NodeId>(i));
  }
  if (!out.uncovered_down.empty() || !out.uncovered_up.empty()) {
    out.status = AssignStatus::Infeasible;
    return out;
  }

  // Airtime in ms and bits in kbit keep the tableau well scaled.
  const double T_ms = T * 1e3;
  lp::Problem prob;
  prob.num_vars = static_cast<int>(var_pair.size());
  prob.objective.resize(var_pair.size());
  for (std::size_t v = 0; v < var_pair.size(); ++v)
    prob.objective[v] = pair_bits(pairs[var_pair[v]].key, demands) * 1e-3;

  auto add_direction = [&](const std::vector<int>& vars, double eta, double cap) {
    if (vars.empty()) return;
    std::vector<lp::Term> terms;
    terms.reserve(vars.size());
    double t_min = std::numeric_limits<double>::infinity();
    for (const int v : vars) {
      terms.push_back({v, 1.0});
      t_min = std::min(t_min, pairs[var_pair[static_cast<std::size_t>(v)]].metrics.t_s);
    }
    if (eta > 0.0) prob.constraints.push_back({terms, lp::Sense::GreaterEqual, eta});
    if (cap * t_min < T) prob.constraints.push_back({std::move(terms), lp::Sense::LessEqual, cap});
  };
  for (std::size_t i = 1; i < nc; ++i) {
    add_direction(down_vars[i], shares.eta_d[i], demands.lambda_d[i] * T);
    add_direction(up_vars[i], shares.eta_u[i], demands.lambda_u[i] * T);
  }
  if (!var_pair.empty()) {
    lp::Constraint airtime;
    airtime.sense = lp::Sense::LessEqual;
    airtime.rhs = T_ms;
    for (std::size_t v = 0; v < var_pair.size(); ++v)
      airtime.terms.push_back({static_cast<int>(v), pairs[var_pair[v]].metrics.t_s * 1e3});
    prob.constraints.push_back(std::move(airtime));
  }

  const lp::Solution sol = lp::solve(prob, options);
  out.lp_iterations = sol.iterations;
  if (sol.status == lp::Status::Infeasible) {
    out.status = AssignStatus::Infeasible;
    return out;
  }
  if (sol.status != lp::Status::Optimal)
    throw std::runtime_error(std::string("solve_assignment: LP ended ") + lp::to_string(sol.status));

  for (std::size_t v = 0; v < var_pair.size(); ++v) out.n[var_pair[v]] = sol.x[v];
  out.objective_bps = allocation_throughput_bps(pairs, demands, out.n);
  return out;
}

ProbabilityMap to_probabilities(const Allocation& allocation) {
  ProbabilityMap p;
  const double total = allocation.total();
  if (!(total > 0.0)) return p;
  for (std::size_t k = 0; k < allocation.n.size(); ++k) {
    if (allocation.n[k] > 0.0) p[allocation.keys[k]] = allocation.n[k] / total;
  }
  return p;
}

std::map<NodeId, double> downlink_marginals(const ProbabilityMap& p) {
  std::map<NodeId, double> p_d;
  for (const auto& [key, prob] : p) p_d[key.down] += prob;
  return p_d;
}

ProbabilityMap conditional_uplink(const ProbabilityMap& p, const std::map<NodeId, double>& p_d) {
  ProbabilityMap p_u;
  for (const auto& [key, prob] : p) {
    const auto it = p_d.find(key.down);
    if (it == p_d.end() || !(it->second > 0.0))
      throw std::domain_error("conditional_uplink: p_d(" + std::to_string(key.down) + ") is zero");
    p_u[key] = prob / it->second;
  }
  return p_u;
}

std::optional<int> contention_window(double p_u, int cw_max) {
  if (p_u < 0.0 || p_u > 1.0 || std::isnan(p_u))
    throw std::invalid_argument("contention_window: probability outside [0, 1]");
  if (cw_max < 1) throw std::invalid_argument("contention_window: cw_max must be >= 1");
  if (p_u == 0.0) return std::nullopt;
  const double inv = std::ceil(1.0 / p_u);
  return inv >= static_cast<double>(cw_max) ? cw_max : static_cast<int>(inv);
}

AccessTable::AccessTable(const ProbabilityMap& p, const PairSet& pairs, int n_clients, int cw_max)
    : idle_(p.empty()),
      p_d_(static_cast<std::size_t>(n_clients) + 1, 0.0),
      by_down_(static_cast<std::size_t>(n_clients) + 1) {
  if (p.empty()) return;
  const auto marg = downlink_marginals(p);
  const auto cond = conditional_uplink(p, marg);
  for (const auto& [i, v] : marg) p_d_.at(static_cast<std::size_t>(i)) = v;
  for (const auto& [key, prob] : p) {
    const auto idx = pairs.index_of(key);
    if (!idx) throw std::invalid_argument("AccessTable: probability for a pair outside the candidate set");
    const double pu = cond.at(key);
    const auto cw = contention_window(std::min(pu, 1.0), cw_max);
    if (!cw) continue;
    by_down_.at(static_cast<std::size_t>(key.down)).push_back({key.up, prob, pu, *cw, *idx});
  }
}

const AccessEntry* AccessTable::find(PairKey key) const {
  if (key.down < 0 || static_cast<std::size_t>(key.down) >= by_down_.size()) return nullptr;
  for (const AccessEntry& e : by_down_[static_cast<std::size_t>(key.down)])
    if (e.up == key.up) return &e;
  return nullptr;
}

double AccessTable::probability(PairKey key) const {
  const AccessEntry* e = find(key);
  return e ? e->p : 0.0;
}

bool AccessTable::has_full_duplex(NodeId down) const {
  if (down == 0) return false;
  for (const AccessEntry& e : by_down_[static_cast<std::size_t>(down)])
    if (e.up != 0) return true;
  return false;
}

namespace {

/// Cheapest airtime among the pairs serving one direction.
double cheapest_airtime(const PairSet& pairs, NodeId client, bool downlink) {
  double t = std::numeric_limits<double>::infinity();
  for (const CandidatePair& p : pairs.entries()) {
    if ((downlink ? p.key.down : p.key.up) == client) t = std::min(t, p.metrics.t_s);
  }
  return t;
}

}  // namespace

EpochAssignment assign_with_pairs(const DemandSnapshot& demands, PairSet pairs, const AssignConfig& cfg) {
  EpochAssignment out;
  out.pairs = std::move(pairs);
  out.shares = min_fair_shares(demands, mean_lowest_rate_airtime(demands, cfg.rates));
  const int clients = demands.client_count();

  for (;;) {
    out.allocation = solve_assignment(out.pairs, demands, out.shares, cfg.lp);
    if (out.allocation.status == AssignStatus::Optimal) break;

    if (!out.allocation.uncovered_down.empty() || !out.allocation.uncovered_up.empty()) {
      for (const NodeId i : out.allocation.uncovered_down) out.shares.eta_d[static_cast<std::size_t>(i)] = 0.0;
      for (const NodeId j : out.allocation.uncovered_up) out.shares.eta_u[static_cast<std::size_t>(j)] = 0.0;
      const auto zeroed = out.allocation.uncovered_down.size() + out.allocation.uncovered_up.size();
      out.relaxed_shares += static_cast<int>(zeroed);
      log_warn("assign_epoch: " + std::to_string(zeroed) +
               " minimum share(s) without a candidate pair were zeroed");
      continue;
    }

    // The lower bounds do not fit into the epoch at the real link rates:
    // drop the share whose cheapest pair costs the most airtime.
    NodeId worst = 0;
    bool worst_down = true;
    double worst_t = -1.0;
    for (NodeId i = 1; i <= clients; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (out.shares.eta_d[ui] > 0.0) {
        const double t = cheapest_airtime(out.pairs, i, true);
        if (t > worst_t) worst_t = t, worst = i, worst_down = true;
      }
      if (out.shares.eta_u[ui] > 0.0) {
        const double t = cheapest_airtime(out.pairs, i, false);
        if (t > worst_t) worst_t = t, worst = i, worst_down = false;
      }
    }
    if (worst == 0) throw std::logic_error("assign_epoch: LP infeasible without any minimum share");
    (worst_down ? out.shares.eta_d : out.shares.eta_u)[static_cast<std::size_t>(worst)] = 0.0;
    ++out.relaxed_shares;
    log_warn("assign_epoch: airtime cannot cover every minimum share; zeroed " +
             std::string(worst_down ? "downlink" : "uplink") + " share of client " + std::to_string(worst));
  }

  out.probabilities = to_probabilities(out.allocation);
  out.table = AccessTable(out.probabilities, out.pairs, clients, cfg.cw_max);
  return out;
}

EpochAssignment assign_epoch(const DemandSnapshot& demands, const LinkState& link, const AssignConfig& cfg) {
  demands.validate();
  if (link.client_count() != demands.client_count())
    throw std::invalid_argument("assign_epoch: demand and link state disagree on the client count");
  FrameLengths frames{demands.l_d_bits, demands.l_u_bits};
  PairSet pairs = build_candidate_pairs(link, cfg.power, cfg.rates, cfg.pairing, frames);
  return assign_with_pairs(demands, std::move(pairs), cfg);
}

void write_access_table(std::ostream& os, const EpochAssignment& a) {
  os << "# down up n p p_d p_u cw\n";
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    const PairKey key = a.pairs[k].key;
    const AccessEntry* e = a.table.find(key);
    if (!e && a.allocation.n[k] <= 0.0) continue;
    os << key.down << ' ' << key.up << ' ' << a.allocation.n[k] << ' ' << (e ? e->p : 0.0) << ' '
       << a.table.p_d(key.down) << ' ' << (e ? e->p_u : 0.0) << ' ' << (e ? e->cw : 0) << '\n';
  }
}

}  // namespace fdmac
