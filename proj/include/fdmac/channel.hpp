#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fdmac/rng.hpp"

namespace fdmac {

/// Node index. The AP is always node 0, clients are 1..C.
using NodeId = int;
inline constexpr NodeId kAp = 0;

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);

struct Point {
  double x_m = 0.0;
  double y_m = 0.0;
};

struct Topology {
  double area_side_m = 100.0;
  std::vector<Point> positions;  // positions[0] is the AP

  int node_count() const { return static_cast<int>(positions.size()); }
  int client_count() const { return node_count() - 1; }
  double distance(NodeId a, NodeId b) const;
};

struct PowerConfig {
  double max_tx_dbm = 15.0;
  double noise_dbm = -95.0;

  double max_tx_w() const { return dbm_to_watts(max_tx_dbm); }
  double noise_w() const { return dbm_to_watts(noise_dbm); }
};

struct ChannelConfig {
  double pl0_db = 40.05;  // free-space loss at 1 m, 2.4 GHz
  double path_loss_exponent = 3.0;
  double sic_db = 110.0;
  double min_distance_m = 1.0;
};

/// Per-epoch channel realization: reciprocal pairwise power gains, per-node
/// noise and the residual self-interference gain of the AP.
class LinkState {
 public:
  LinkState() = default;
  LinkState(int node_count, double noise_w, double sic_db);

  int node_count() const { return nodes_; }
  int client_count() const { return nodes_ - 1; }

  double gain(NodeId a, NodeId b) const { return gain_[index(a, b)]; }
  void set_gain(NodeId a, NodeId b, double g);

  double noise_w(NodeId n) const { return noise_[static_cast<std::size_t>(n)]; }
  void set_noise_w(NodeId n, double w) { noise_[static_cast<std::size_t>(n)] = w; }

  double sic_db() const { return sic_db_; }
  double self_gain() const { return self_gain_; }

 private:
  std::size_t index(NodeId a, NodeId b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(nodes_) + static_cast<std::size_t>(b);
  }

  int nodes_ = 0;
  double sic_db_ = 0.0;
  double self_gain_ = 1.0;
  std::vector<double> gain_;
  std::vector<double> noise_;
};

/// AP plus n_clients nodes, i.i.d. uniform over [0, side]^2.
Topology generate_topology(int n_clients, double area_side_m, std::uint64_t seed);

double path_loss_db(double distance_m, const ChannelConfig& cfg = {});

/// fading_power * 10^(-PL(d)/10). Distances in (0, min_distance) are clamped.
double link_gain(double distance_m, double fading_power, const ChannelConfig& cfg = {});

/// Draws one |g|^2 ~ Exp(1) per unordered node pair.
LinkState draw_link_state(const Topology& topo, const ChannelConfig& cfg, const PowerConfig& power,
                          Rng& rng);

/// Path loss only (unit fading on every link).
LinkState mean_link_state(const Topology& topo, const ChannelConfig& cfg, const PowerConfig& power);

/// P_ap |h_0i|^2 / (sigma_i^2 + P_up |h_ji|^2)
double sinr_downlink(double p_ap_w, double p_up_w, double gain_0i, double gain_ji, double noise_i_w);

/// P_up |h_j0|^2 / (sigma_0^2 + P_ap |h_00|^2)
double sinr_uplink(double p_up_w, double p_ap_w, double gain_j0, double self_gain, double noise_ap_w);

/// Plain-text table: a "# node_id x_m y_m" header then one row per node.
void write_topology(std::ostream& os, const Topology& topo);
Topology read_topology(std::istream& is, double area_side_m);

}  // namespace fdmac
