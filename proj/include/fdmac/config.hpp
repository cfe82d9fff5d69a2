#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fdmac/channel.hpp"
#include "fdmac/phy.hpp"

namespace fdmac {

enum class Scheme { Proposed, Oracle, MaxRate, Greedy, Random, HalfDuplex };

inline constexpr Scheme kAllSchemes[] = {Scheme::Proposed, Scheme::Oracle, Scheme::MaxRate,
                                         Scheme::Greedy,   Scheme::Random, Scheme::HalfDuplex};

std::string_view to_string(Scheme s);
/// Case-insensitive; accepts "half-duplex" / "halfduplex" / "hd" etc.
Scheme parse_scheme(std::string_view name);

/// Arrival rate reserved for the backlogged approximation.
inline constexpr double kBackloggedFps = 2000.0;

struct SimConfig {
  int n_clients = 30;
  int epochs = 1000;
  double epoch_ms = 100.0;
  double arrival_interval_ms = 0.5;
  /// Per-client rate for both directions unless a range or explicit vector is given.
  double arrival_fps = kBackloggedFps;
  /// When hi > lo, every client draws one rate uniformly from [lo, hi].
  double arrival_lo_fps = 0.0;
  double arrival_hi_fps = 0.0;
  /// Explicit per-client rates (index 1..C); override the scalar and range.
  std::vector<double> lambda_d_fps;
  std::vector<double> lambda_u_fps;

  int frame_bytes = 1500;
  double delta_db = 5.0;
  double sic_db = 110.0;
  int cw_max = 1024;
  double epsilon_mbps = 0.5;

  double difs_us = 34.0;
  double sifs_us = 16.0;
  double slot_us = 9.0;
  double tone_us = 20.0;
  double header_us = 44.0;
  double ack_us = 44.0;

  int dcf_cw_min = 16;
  int dcf_cw_max = 1024;
  /// 0 = retry until delivered.
  int retry_limit = 0;

  double area_side_m = 100.0;
  double max_tx_dbm = 15.0;
  double noise_dbm = -95.0;
  double pl0_db = 40.05;
  double path_loss_exponent = 3.0;
  bool fading_per_packet = false;
  /// Std-dev (dB) of the log-normal error on the overheard ICI gain; 0 = exact.
  double ici_estimation_error_db = 0.0;

  int n_aps = 1;
  int tone_subchannels = 16;

  std::vector<double> rates_mbps{6, 9, 12, 18, 24, 36, 48, 54};
  std::vector<double> rate_thresholds_db{5, 6, 8, 11, 15, 19, 23, 25};
  double pdr_steepness_per_db = 2.0;

  Scheme scheme = Scheme::Proposed;
  std::uint64_t seed = 1;

  double epoch_s() const { return epoch_ms * 1e-3; }
  double frame_bits() const { return 8.0 * frame_bytes; }
  bool heterogeneous() const { return arrival_hi_fps > arrival_lo_fps; }
  PowerConfig power() const { return {max_tx_dbm, noise_dbm}; }
  ChannelConfig channel() const { return {pl0_db, path_loss_exponent, sic_db, 1.0}; }
  RateTable rate_table() const { return {rates_mbps, rate_thresholds_db, pdr_steepness_per_db}; }

  /// Names of every offending field; empty when valid.
  std::vector<std::string> validation_errors() const;
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies one "key = value" assignment. Throws ConfigError on unknown keys
/// or malformed values.
void set_config_value(SimConfig& cfg, std::string_view key, std::string_view value);

/// Reads "key = value" lines; '#' starts a comment.
void load_config(std::istream& is, SimConfig& cfg);
void load_config_file(const std::string& path, SimConfig& cfg);

/// Every field in the format load_config reads.
void print_config(std::ostream& os, const SimConfig& cfg);

std::vector<double> parse_double_list(std::string_view text);

}  // namespace fdmac
