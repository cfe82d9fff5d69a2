#include "fdmac/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace fdmac {

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None:
      return "none";
    case SweepAxis::Clients:
      return "clients";
    case SweepAxis::ArrivalRate:
      return "arrival_rate";
    case SweepAxis::Delta:
      return "delta";
    case SweepAxis::Sic:
      return "sic";
    case SweepAxis::Scheme:
      return "scheme";
  }
  return "none";
}

SweepAxis parse_axis(std::string_view name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::replace(s.begin(), s.end(), '-', '_');
  if (s == "clients" || s == "n_clients") return SweepAxis::Clients;
  if (s == "arrival_rate" || s == "arrival" || s == "arrival_fps") return SweepAxis::ArrivalRate;
  if (s == "delta" || s == "delta_db") return SweepAxis::Delta;
  if (s == "sic" || s == "sic_db") return SweepAxis::Sic;
  if (s == "scheme" || s == "schemes") return SweepAxis::Scheme;
  throw std::invalid_argument("unknown sweep axis: " + std::string(name));
}

std::vector<double> parse_sweep_values(std::string_view text) {
  if (std::count(text.begin(), text.end(), ':') == 2) {
    std::string t(text);
    std::replace(t.begin(), t.end(), ':', ',');
    const std::vector<double> p = parse_double_list(t);
    if (p.size() != 3 || !(p[2] > 0.0) || p[1] < p[0])
      throw std::invalid_argument("sweep range must be lo:hi:step with step > 0 and hi >= lo");
    std::vector<double> out;
    for (long k = 0;; ++k) {
      const double v = p[0] + static_cast<double>(k) * p[2];
      if (v > p[1] + 1e-9 * std::max(1.0, std::abs(p[1]))) break;
      out.push_back(v);
    }
    return out;
  }
  std::vector<double> v = parse_double_list(text);
  if (v.empty()) throw std::invalid_argument("empty sweep value list");
  return v;
}

void Scenario::validate() const {
  if (axis != SweepAxis::None && axis != SweepAxis::Scheme && values.empty())
    throw std::invalid_argument("scenario: sweep axis has no values");
  if (schemes.empty()) throw std::invalid_argument("scenario: no schemes");
  if (seeds.empty()) throw std::invalid_argument("scenario: no seeds");
}

void apply_sweep(Scenario& scenario, std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos) throw std::invalid_argument("sweep must be axis=values");
  const SweepAxis axis = parse_axis(spec.substr(0, eq));
  const std::string_view rest = spec.substr(eq + 1);
  if (axis == SweepAxis::Scheme) {
    scenario.schemes.clear();
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const auto tok = rest.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
      if (!tok.empty()) scenario.schemes.push_back(parse_scheme(tok));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (scenario.schemes.empty()) throw std::invalid_argument("scheme sweep lists no schemes");
    if (scenario.axis == SweepAxis::None) scenario.axis = SweepAxis::Scheme;
    return;
  }
  if (scenario.axis != SweepAxis::None && scenario.axis != SweepAxis::Scheme)
    throw std::invalid_argument("only one numeric sweep axis is supported");
  scenario.axis = axis;
  scenario.values = parse_sweep_values(rest);
}

std::vector<SimConfig> expand(const Scenario& scenario) {
  scenario.validate();
  const bool numeric = scenario.axis != SweepAxis::None && scenario.axis != SweepAxis::Scheme;
  const std::vector<double> values = numeric ? scenario.values : std::vector<double>{0.0};
  std::vector<SimConfig> out;
  for (double v : values) {
    SimConfig cfg = scenario.base;
    switch (scenario.axis) {
      case SweepAxis::Clients:
        cfg.n_clients = static_cast<int>(std::lround(v));
        break;
      case SweepAxis::ArrivalRate:
        cfg.arrival_fps = v;
        cfg.arrival_lo_fps = cfg.arrival_hi_fps = 0.0;
        break;
      case SweepAxis::Delta:
        cfg.delta_db = v;
        break;
      case SweepAxis::Sic:
        cfg.sic_db = v;
        break;
      default:
        break;
    }
    for (Scheme s : scenario.schemes) {
      for (std::uint64_t seed : scenario.seeds) {
        SimConfig c = cfg;
        c.scheme = s;
        c.seed = seed;
        c.validate();
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

ScenarioResult run_scenario(const Scenario& scenario) {
  ScenarioResult r;
  r.configs = expand(scenario);
  r.reports = run_simulations(r.configs);
  return r;
}

double nominal_arrival_fps(const SimConfig& cfg) {
  if (!cfg.lambda_d_fps.empty() || !cfg.lambda_u_fps.empty()) {
    double s = 0.0;
    int n = 0;
    for (const auto* v : {&cfg.lambda_d_fps, &cfg.lambda_u_fps}) {
      for (std::size_t k = 1; k < v->size(); ++k, ++n) s += (*v)[k];
    }
    return n > 0 ? s / n : cfg.arrival_fps;
  }
  if (cfg.heterogeneous()) return 0.5 * (cfg.arrival_lo_fps + cfg.arrival_hi_fps);
  return cfg.arrival_fps;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{
      "scheme",         "n_clients",     "arrival_fps",    "delta_db",     "sic_db",
      "seed",           "tput_total_mbps", "tput_down_mbps", "tput_up_mbps", "collision_prob",
      "fd_time_frac",   "hd_time_frac",  "mean_contention_us"};
  return cols;
}

namespace {

void write_header(std::ostream& os, const std::vector<std::string>& cols) {
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
}

void write_key(std::ostream& os, const SimConfig& c) {
  os << to_string(c.scheme) << ',' << c.n_clients << ',' << nominal_arrival_fps(c) << ',' << c.delta_db << ','
     << c.sic_db << ',' << c.seed;
}

}  // namespace

void write_summary_csv(std::ostream& os, const ScenarioResult& result) {
  write_header(os, summary_columns());
  const auto old = os.precision(10);
  for (std::size_t k = 0; k < result.reports.size(); ++k) {
    const SimReport& r = result.reports[k];
    write_key(os, result.configs[k]);
    os << ',' << r.tput_total_mbps() << ',' << r.tput_down_mbps() << ',' << r.tput_up_mbps() << ','
       << r.collision_prob() << ',' << r.fd_time_frac() << ',' << r.hd_time_frac() << ','
       << r.mean_contention_us() << '\n';
  }
  os.precision(old);
}

void write_per_client_csv(std::ostream& os, const ScenarioResult& result) {
  write_header(os, {"scheme", "n_clients", "arrival_fps", "delta_db", "sic_db", "seed", "client", "uplink_tx",
                    "uplink_share", "downlink_tx", "tput_down_mbps", "tput_up_mbps"});
  const auto old = os.precision(10);
  for (std::size_t k = 0; k < result.reports.size(); ++k) {
    const SimReport& r = result.reports[k];
    long total_up = 0;
    for (std::size_t c = 1; c < r.clients.size(); ++c) total_up += r.clients[c].uplink_tx;
    for (std::size_t c = 1; c < r.clients.size(); ++c) {
      const ClientStats& s = r.clients[c];
      write_key(os, result.configs[k]);
      const double share = total_up > 0 ? static_cast<double>(s.uplink_tx) / static_cast<double>(total_up) : 0.0;
      const double dur = r.duration_s();
      os << ',' << c << ',' << s.uplink_tx << ',' << share << ',' << s.downlink_tx << ','
         << (dur > 0 ? s.bits_down / dur / 1e6 : 0.0) << ',' << (dur > 0 ? s.bits_up / dur / 1e6 : 0.0) << '\n';
    }
  }
  os.precision(old);
}

void write_per_pair_csv(std::ostream& os, const ScenarioResult& result) {
  write_header(os, {"scheme", "n_clients", "arrival_fps", "delta_db", "sic_db", "seed", "down", "up",
                    "assigned_p", "realized_p"});
  const auto old = os.precision(10);
  for (std::size_t k = 0; k < result.reports.size(); ++k) {
    const SimReport& r = result.reports[k];
    if (r.table_txops <= 0) continue;
    const double n = static_cast<double>(r.table_txops);
    for (const auto& [key, f] : r.pairs) {
      if (f.assigned <= 0.0 && f.realized <= 0.0) continue;
      write_key(os, result.configs[k]);
      os << ',' << key.down << ',' << key.up << ',' << f.assigned / n << ',' << f.realized / n << '\n';
    }
  }
  os.precision(old);
}

}  // namespace fdmac
