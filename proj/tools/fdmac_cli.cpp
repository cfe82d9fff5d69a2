#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fdmac/baselines.hpp"
#include "fdmac/config.hpp"
#include "fdmac/experiment.hpp"
#include "fdmac/log.hpp"
#include "fdmac/mac.hpp"

namespace {

using namespace fdmac;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

void apply_arrival(SimConfig& cfg, const std::string& text) {
  if (text == "backlogged") {
    cfg.arrival_fps = kBackloggedFps;
    cfg.arrival_lo_fps = cfg.arrival_hi_fps = 0.0;
    return;
  }
  const auto parts = split(text, ':');
  try {
    if (parts.size() == 2) {
      cfg.arrival_lo_fps = std::stod(parts[0]);
      cfg.arrival_hi_fps = std::stod(parts[1]);
      if (!(cfg.arrival_hi_fps > cfg.arrival_lo_fps)) throw UsageError("--arrival-fps range needs hi > lo");
      return;
    }
    if (parts.size() == 1) {
      cfg.arrival_fps = std::stod(parts[0]);
      cfg.arrival_lo_fps = cfg.arrival_hi_fps = 0.0;
      return;
    }
  } catch (const std::logic_error&) {
  }
  throw UsageError("--arrival-fps expects a number, lo:hi or 'backlogged'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  const auto range = split(text, ':');
  try {
    if (range.size() == 2 && text.find(',') == std::string::npos) {
      const auto lo = std::stoull(range[0]);
      const auto hi = std::stoull(range[1]);
      if (hi < lo) throw UsageError("--seeds range needs hi >= lo");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
      return out;
    }
    for (const auto& t : split(text, ',')) out.push_back(std::stoull(t));
  } catch (const std::logic_error&) {
    throw UsageError("--seeds expects a list (1,2,3) or a range (1:5)");
  }
  if (out.empty()) throw UsageError("--seeds is empty");
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::ios_base::failure("cannot open " + path + " for writing");
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Full-duplex WLAN MAC simulator"};

  std::string config_path, scheme_text, arrival_text, seeds_text, out_path, per_client_path, per_pair_path;
  std::string topology_in, topology_out, pairs_out, access_out;
  std::optional<int> clients, epochs;
  std::optional<double> epoch_ms, delta_db, sic_db;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sweeps, sets;
  bool print_cfg = false, quiet = false, verbose = false;

  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--scheme", scheme_text, "proposed|oracle|maxrate|greedy|random|halfduplex, comma list allowed");
  app.add_option("--clients", clients, "Number of clients");
  app.add_option("--epochs", epochs, "Epochs per run");
  app.add_option("--epoch-ms", epoch_ms, "Epoch duration (ms)");
  app.add_option("--arrival-fps", arrival_text, "Per-client rate: number, lo:hi, or backlogged");
  app.add_option("--delta-db", delta_db, "ICI threshold (dB)");
  app.add_option("--sic-db", sic_db, "Self-interference suppression (dB)");
  auto* seed_opt = app.add_option("--seed", seed, "Single seed");
  app.add_option("--seeds", seeds_text, "Seed list (1,2,3) or range (1:5); default 1:5")->excludes(seed_opt);
  app.add_option("--sweep", sweeps, "axis=values, axis in clients|arrival_rate|delta|sic|scheme");
  app.add_option("--set", sets, "Override any config key: key=value");
  app.add_option("--out", out_path, "Summary CSV (default stdout)");
  app.add_option("--per-client-out", per_client_path, "Per-client CSV");
  app.add_option("--per-pair-out", per_pair_path, "Per-pair assigned/realized CSV");
  app.add_option("--topology", topology_in, "Load node positions instead of drawing them");
  app.add_option("--dump-topology", topology_out, "Write node positions");
  app.add_option("--dump-pairs", pairs_out, "Write the first epoch's candidate pairs");
  app.add_option("--dump-access", access_out, "Write every epoch's access table");
  app.add_flag("--print-config", print_cfg, "Print the effective configuration and exit");
  app.add_flag("-q,--quiet", quiet, "Suppress warnings");
  app.add_flag("-v,--verbose", verbose, "Informational logging");

  CLI11_PARSE(app, argc, argv);

  try {
    set_log_level(quiet ? LogLevel::Quiet : verbose ? LogLevel::Info : LogLevel::Warn);

    Scenario sc;
    if (!config_path.empty()) load_config_file(config_path, sc.base);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value");
      set_config_value(sc.base, s.substr(0, eq), s.substr(eq + 1));
    }
    SimConfig& base = sc.base;
    if (clients) base.n_clients = *clients;
    if (epochs) base.epochs = *epochs;
    if (epoch_ms) base.epoch_ms = *epoch_ms;
    if (delta_db) base.delta_db = *delta_db;
    if (sic_db) base.sic_db = *sic_db;
    if (!arrival_text.empty()) apply_arrival(base, arrival_text);
    if (!scheme_text.empty()) {
      sc.schemes.clear();
      for (const auto& t : split(scheme_text, ',')) sc.schemes.push_back(parse_scheme(t));
      base.scheme = sc.schemes.front();
    } else {
      sc.schemes = {base.scheme};
    }
    if (seed) {
      sc.seeds = {*seed};
      base.seed = *seed;
    } else if (!seeds_text.empty()) {
      sc.seeds = parse_seeds(seeds_text);
    }
    for (const auto& s : sweeps) apply_sweep(sc, s);

    if (print_cfg) {
      base.validate();
      print_config(std::cout, base);
      return 0;
    }

    const bool single_path = !topology_in.empty() || !topology_out.empty() || !pairs_out.empty() || !access_out.empty();
    ScenarioResult result;
    if (!single_path) {
      result = run_scenario(sc);
    } else {
      result.configs = expand(sc);
      std::ofstream access_file, pairs_file, topo_file;
      if (!access_out.empty()) access_file = open_out(access_out);
      if (!pairs_out.empty()) pairs_file = open_out(pairs_out);
      if (!topology_out.empty()) topo_file = open_out(topology_out);
      std::optional<Topology> loaded;
      if (!topology_in.empty()) {
        std::ifstream f(topology_in);
        if (!f) throw std::ios_base::failure("cannot read " + topology_in);
        loaded = read_topology(f, base.area_side_m);
      }
      for (const SimConfig& c : result.configs) {
        Replica r = loaded ? Replica(c, *loaded) : Replica(c);
        if (topo_file.is_open()) {
          topo_file << "# scheme " << to_string(c.scheme) << " seed " << c.seed << '\n';
          write_topology(topo_file, r.topology());
        }
        if (access_file.is_open()) {
          access_file << "# scheme " << to_string(c.scheme) << " seed " << c.seed << '\n';
          r.set_access_dump(&access_file);
        }
        r.run_epoch();
        if (pairs_file.is_open()) {
          pairs_file << "# scheme " << to_string(c.scheme) << " seed " << c.seed << '\n';
          if (const EpochAssignment* a = r.policy().assignment()) write_pair_table(pairs_file, a->pairs);
        }
        r.run();
        result.reports.push_back(r.report());
      }
    }

    if (out_path.empty()) {
      write_summary_csv(std::cout, result);
    } else {
      auto f = open_out(out_path);
      write_summary_csv(f, result);
    }
    if (!per_client_path.empty()) {
      auto f = open_out(per_client_path);
      write_per_client_csv(f, result);
    }
    if (!per_pair_path.empty()) {
      auto f = open_out(per_pair_path);
      write_per_pair_csv(f, result);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
