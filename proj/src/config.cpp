#include "fdmac/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fdmac {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Proposed: return "proposed";
    case Scheme::Oracle: return "oracle";
    case Scheme::MaxRate: return "maxrate";
    case Scheme::Greedy: return "greedy";
    case Scheme::Random: return "random";
    case Scheme::HalfDuplex: return "halfduplex";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  std::string key;
  for (const char c : name)
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "proposed") return Scheme::Proposed;
  if (key == "oracle") return Scheme::Oracle;
  if (key == "maxrate") return Scheme::MaxRate;
  if (key == "greedy") return Scheme::Greedy;
  if (key == "random") return Scheme::Random;
  if (key == "halfduplex" || key == "hd" || key == "dcf") return Scheme::HalfDuplex;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s = trim(v);
  double out = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("bad value for " + std::string(key) + ": '" + s + "'");
  return out;
}

long long to_int(std::string_view key, std::string_view v) {
  const std::string s = trim(v);
  long long out = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("bad integer for " + std::string(key) + ": '" + s + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  std::string s = trim(v);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("bad boolean for " + std::string(key) + ": '" + s + "'");
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

struct Field {
  std::function<void(SimConfig&, std::string_view)> set;
  std::function<std::string(const SimConfig&)> get;
};

template <typename T>
std::string show(const T& v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

#define FDMAC_DOUBLE(name) \
  {#name, {[](SimConfig& c, std::string_view v) { c.name = to_double(#name, v); }, [](const SimConfig& c) { return show(c.name); }}}
#define FDMAC_INT(name) \
  {#name, {[](SimConfig& c, std::string_view v) { c.name = static_cast<int>(to_int(#name, v)); }, [](const SimConfig& c) { return show(c.name); }}}
#define FDMAC_LIST(name) \
  {#name, {[](SimConfig& c, std::string_view v) { c.name = parse_double_list(v); }, [](const SimConfig& c) { return join(c.name); }}}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      FDMAC_INT(n_clients),
      FDMAC_INT(epochs),
      FDMAC_DOUBLE(epoch_ms),
      FDMAC_DOUBLE(arrival_interval_ms),
      FDMAC_DOUBLE(arrival_fps),
      FDMAC_DOUBLE(arrival_lo_fps),
      FDMAC_DOUBLE(arrival_hi_fps),
      FDMAC_LIST(lambda_d_fps),
      FDMAC_LIST(lambda_u_fps),
      FDMAC_INT(frame_bytes),
      FDMAC_DOUBLE(delta_db),
      FDMAC_DOUBLE(sic_db),
      FDMAC_INT(cw_max),
      FDMAC_DOUBLE(epsilon_mbps),
      FDMAC_DOUBLE(difs_us),
      FDMAC_DOUBLE(sifs_us),
      FDMAC_DOUBLE(slot_us),
      FDMAC_DOUBLE(tone_us),
      FDMAC_DOUBLE(header_us),
      FDMAC_DOUBLE(ack_us),
      FDMAC_INT(dcf_cw_min),
      FDMAC_INT(dcf_cw_max),
      FDMAC_INT(retry_limit),
      FDMAC_DOUBLE(area_side_m),
      FDMAC_DOUBLE(max_tx_dbm),
      FDMAC_DOUBLE(noise_dbm),
      FDMAC_DOUBLE(pl0_db),
      FDMAC_DOUBLE(path_loss_exponent),
      {"fading_per_packet",
       {[](SimConfig& c, std::string_view v) { c.fading_per_packet = to_bool("fading_per_packet", v); },
        [](const SimConfig& c) { return std::string(c.fading_per_packet ? "true" : "false"); }}},
      FDMAC_DOUBLE(ici_estimation_error_db),
      FDMAC_INT(n_aps),
      FDMAC_INT(tone_subchannels),
      FDMAC_LIST(rates_mbps),
      FDMAC_LIST(rate_thresholds_db),
      FDMAC_DOUBLE(pdr_steepness_per_db),
      {"scheme",
       {[](SimConfig& c, std::string_view v) { c.scheme = parse_scheme(trim(v)); },
        [](const SimConfig& c) { return std::string(to_string(c.scheme)); }}},
      {"seed",
       {[](SimConfig& c, std::string_view v) { c.seed = static_cast<std::uint64_t>(to_int("seed", v)); },
        [](const SimConfig& c) { return show(c.seed); }}},
  };
  return table;
}

#undef FDMAC_DOUBLE
#undef FDMAC_INT
#undef FDMAC_LIST

}  // namespace

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(to_double("list", t));
  }
  return out;
}

void set_config_value(SimConfig& cfg, std::string_view key, std::string_view value) {
  const auto it = fields().find(trim(key));
  if (it == fields().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  it->second.set(cfg, value);
}

void load_config(std::istream& is, SimConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void load_config_file(const std::string& path, SimConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  load_config(in, cfg);
}

void print_config(std::ostream& os, const SimConfig& cfg) {
  os << "# fdmac simulation config (key = value; times in us unless suffixed)\n";
  for (const auto& [key, field] : fields()) os << key << " = " << field.get(cfg) << '\n';
}

std::vector<std::string> SimConfig::validation_errors() const {
  std::vector<std::string> bad;
  auto check = [&](bool ok, const char* name) {
    if (!ok) bad.emplace_back(name);
  };
  check(n_clients >= 1, "n_clients");
  check(epochs >= 1, "epochs");
  check(epoch_ms > 0.0, "epoch_ms");
  check(arrival_interval_ms > 0.0, "arrival_interval_ms");
  check(arrival_fps >= 0.0, "arrival_fps");
  check(arrival_lo_fps >= 0.0 && arrival_hi_fps >= 0.0, "arrival_lo_fps/arrival_hi_fps");
  const auto nc = static_cast<std::size_t>(std::max(n_clients, 0)) + 1;
  check(lambda_d_fps.empty() || lambda_d_fps.size() == nc, "lambda_d_fps");
  check(lambda_u_fps.empty() || lambda_u_fps.size() == nc, "lambda_u_fps");
  check(frame_bytes > 0, "frame_bytes");
  check(delta_db >= 0.0, "delta_db");
  check(cw_max >= 1, "cw_max");
  check(epsilon_mbps >= 0.0, "epsilon_mbps");
  check(difs_us > 0.0, "difs_us");
  check(sifs_us > 0.0, "sifs_us");
  check(slot_us > 0.0, "slot_us");
  check(tone_us > 0.0, "tone_us");
  check(header_us > 0.0, "header_us");
  check(ack_us > 0.0, "ack_us");
  check(epoch_ms * 1e3 > 10.0 * slot_us, "epoch_ms (must be much longer than slot_us)");
  check(dcf_cw_min >= 1 && dcf_cw_max >= dcf_cw_min, "dcf_cw_min/dcf_cw_max");
  check(retry_limit >= 0, "retry_limit");
  check(area_side_m > 0.0, "area_side_m");
  check(max_tx_dbm > noise_dbm, "max_tx_dbm");
  check(path_loss_exponent > 0.0, "path_loss_exponent");
  check(ici_estimation_error_db >= 0.0, "ici_estimation_error_db");
  check(n_aps >= 1, "n_aps");
  check(tone_subchannels >= 1, "tone_subchannels");
  try {
    RateTable t(rates_mbps, rate_thresholds_db, pdr_steepness_per_db);
  } catch (const std::invalid_argument&) {
    bad.emplace_back("rates_mbps/rate_thresholds_db/pdr_steepness_per_db");
  }
  return bad;
}

void SimConfig::validate() const {
  const auto bad = validation_errors();
  if (bad.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& b : bad) msg += " " + b;
  throw ConfigError(msg);
}

}  // namespace fdmac
