#include "fdmac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fdmac {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double Topology::distance(NodeId a, NodeId b) const {
  const Point& p = positions.at(static_cast<std::size_t>(a));
  const Point& q = positions.at(static_cast<std::size_t>(b));
  return std::hypot(p.x_m - q.x_m, p.y_m - q.y_m);
}

LinkState::LinkState(int node_count, double noise_w, double sic_db)
    : nodes_(node_count),
      sic_db_(sic_db),
      self_gain_(db_to_linear(-sic_db)),
      gain_(static_cast<std::size_t>(node_count) * static_cast<std::size_t>(node_count), 0.0),
      noise_(static_cast<std::size_t>(node_count), noise_w) {
  if (node_count < 2) throw std::invalid_argument("LinkState: need the AP and at least one client");
  if (!(noise_w > 0.0)) throw std::invalid_argument("LinkState: noise power must be positive");
}

void LinkState::set_gain(NodeId a, NodeId b, double g) {
  if (!(g >= 0.0)) throw std::invalid_argument("LinkState: gain must be non-negative");
  gain_[index(a, b)] = g;
  gain_[index(b, a)] = g;
}

Topology generate_topology(int n_clients, double area_side_m, std::uint64_t seed) {
  if (n_clients < 1) throw std::invalid_argument("generate_topology: n_clients must be >= 1");
  if (!(area_side_m > 0.0)) throw std::invalid_argument("generate_topology: area side must be > 0");
  Rng rng = make_rng(seed, Stream::Topology);
  std::uniform_real_distribution<double> coord(0.0, area_side_m);
  Topology topo;
  topo.area_side_m = area_side_m;
  topo.positions.resize(static_cast<std::size_t>(n_clients) + 1);
  for (Point& p : topo.positions) {
    p.x_m = coord(rng);
    p.y_m = coord(rng);
  }
  return topo;
}

double path_loss_db(double distance_m, const ChannelConfig& cfg) {
  if (!(distance_m > 0.0) || !std::isfinite(distance_m))
    throw std::invalid_argument("path_loss_db: distance must be positive and finite");
  const double d = std::max(distance_m, cfg.min_distance_m);
  return cfg.pl0_db + 10.0 * cfg.path_loss_exponent * std::log10(d);
}

double link_gain(double distance_m, double fading_power, const ChannelConfig& cfg) {
  if (!(fading_power >= 0.0)) throw std::invalid_argument("link_gain: fading power must be >= 0");
  return fading_power * db_to_linear(-path_loss_db(distance_m, cfg));
}

namespace {

LinkState build_links(const Topology& topo, const ChannelConfig& cfg, const PowerConfig& power,
                      Rng* rng) {
  LinkState link(topo.node_count(), power.noise_w(), cfg.sic_db);
  std::exponential_distribution<double> fading(1.0);
  for (NodeId a = 0; a < topo.node_count(); ++a) {
    for (NodeId b = a + 1; b < topo.node_count(); ++b) {
      // coincident nodes are pushed to the clamp distance
      const double d = std::max(topo.distance(a, b), cfg.min_distance_m);
      const double f = rng ? fading(*rng) : 1.0;
      link.set_gain(a, b, link_gain(d, f, cfg));
    }
  }
  return link;
}

}  // namespace

LinkState draw_link_state(const Topology& topo, const ChannelConfig& cfg, const PowerConfig& power,
                          Rng& rng) {
  return build_links(topo, cfg, power, &rng);
}

LinkState mean_link_state(const Topology& topo, const ChannelConfig& cfg, const PowerConfig& power) {
  return build_links(topo, cfg, power, nullptr);
}

double sinr_downlink(double p_ap_w, double p_up_w, double gain_0i, double gain_ji, double noise_i_w) {
  return p_ap_w * gain_0i / (noise_i_w + p_up_w * gain_ji);
}

double sinr_uplink(double p_up_w, double p_ap_w, double gain_j0, double self_gain, double noise_ap_w) {
  return p_up_w * gain_j0 / (noise_ap_w + p_ap_w * self_gain);
}

void write_topology(std::ostream& os, const Topology& topo) {
  os << "# node_id x_m y_m\n";
  os.precision(17);
  for (NodeId n = 0; n < topo.node_count(); ++n) {
    const Point& p = topo.positions[static_cast<std::size_t>(n)];
    os << n << ' ' << p.x_m << ' ' << p.y_m << '\n';
  }
}

Topology read_topology(std::istream& is, double area_side_m) {
  Topology topo;
  topo.area_side_m = area_side_m;
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    int id = 0;
    Point p;
    if (!(row >> id >> p.x_m >> p.y_m))
      throw std::runtime_error("read_topology: malformed row: " + line);
    if (id != topo.node_count())
      throw std::runtime_error("read_topology: node ids must be consecutive from 0");
    if (p.x_m < 0.0 || p.y_m < 0.0 || p.x_m > area_side_m || p.y_m > area_side_m)
      throw std::runtime_error("read_topology: node " + std::to_string(id) + " outside the area");
    topo.positions.push_back(p);
  }
  if (topo.node_count() < 2) throw std::runtime_error("read_topology: need the AP and one client");
  return topo;
}

}  // namespace fdmac
