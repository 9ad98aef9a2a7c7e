// dnpsim: run experiments, generate traffic traces, validate config files.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 a run did not drain.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "dnp/bench/config_file.hpp"
#include "dnp/bench/experiments.hpp"
#include "dnp/bench/traffic.hpp"

using namespace dnp;
using namespace dnp::bench;

namespace {

constexpr int kUsage = 2;
constexpr int kNotDrained = 3;

struct Common {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
};

SimConfig resolve_config(const Common& c) {
  SimConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else if (!c.preset.empty()) {
    cfg = parse_config("[topology]\npreset = " + c.preset + "\n", "--preset");
  }
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text;
}

std::vector<TraceEntry> read_trace(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open trace " + path);
  std::vector<TraceEntry> out;
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_trace_line(line));
    } catch (const Error& e) {
      throw UsageError(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void add_config_options(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "Config file (sections [topology] [timing] [switch] [link] [rdma] [sim])");
  app->add_option("--preset", c.preset, "Start from a preset instead of a file: shapes, mtnoc, mt2d, torus")
      ->excludes("--config");
  app->add_option("--seed", c.seed, "Override the config seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-accurate DNP interconnect simulator"};
  app.require_subcommand(1);

  // run
  Common run_c;
  std::string experiment, workload, output, format = "csv";
  ExperimentParams params;
  int repeat = 1;
  auto* run = app.add_subcommand("run", "Run a named experiment or replay a command trace");
  add_config_options(run, run_c);
  run->add_option("--experiment", experiment, "Experiment name, or 'all'");
  run->add_option("--workload", workload, "Command trace to replay (cycle tile w0..w6 per line)");
  run->add_option("--max-cycles", params.max_cycles, "Cycle budget per simulated run");
  run->add_option("--output", output, "Report file (default stdout)");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--repeat", repeat, "Run N times with seeds seed..seed+N-1, concurrently")
      ->check(CLI::Range(1, 1024));
  run->add_flag("--trace", params.trace, "Include a per-packet table");
  run->add_option("--sizes", params.sizes, "Payload sizes in words")->delimiter(',');
  run->add_option("--ber", params.bers, "BER values for fault_injection_sweep")->delimiter(',');
  run->add_option("--pattern", params.pattern, "Traffic pattern")
      ->check(CLI::IsMember({"uniform_random", "nearest_neighbor_3d", "hotspot"}));
  run->add_option("--rate", params.rate, "Offered flits per cycle per tile");
  run->add_option("--packets", params.packets, "Commands to generate");
  run->add_option("--min-words", params.min_words, "Smallest generated payload");
  run->add_option("--max-words", params.max_words, "Largest generated payload");

  // gen-traffic
  Common gen_c;
  std::string pattern = "uniform_random", gen_output;
  TrafficSpec spec;
  auto* gen = app.add_subcommand("gen-traffic", "Write a synthetic command trace");
  add_config_options(gen, gen_c);
  gen->add_option("--pattern", pattern, "uniform_random, nearest_neighbor_3d or hotspot")
      ->check(CLI::IsMember({"uniform_random", "nearest_neighbor_3d", "hotspot"}));
  gen->add_option("--rate", spec.rate, "Offered flits per cycle per sending tile");
  gen->add_option("--packets", spec.packets, "Commands (uniform_random, hotspot)");
  gen->add_option("--rounds", spec.rounds, "Halo exchanges (nearest_neighbor_3d)");
  gen->add_option("--min-words", spec.min_words, "Smallest payload");
  gen->add_option("--max-words", spec.max_words, "Largest payload");
  gen->add_option("--hotspot", spec.hotspot, "Hotspot tile index");
  gen->add_option("--output", gen_output, "Trace file (default stdout)");

  // validate-config
  Common val_c;
  auto* val = app.add_subcommand("validate-config", "Check a config file and echo the effective values");
  add_config_options(val, val_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*val) {
      if (val_c.config.empty() && val_c.preset.empty()) throw UsageError("validate-config needs --config or --preset");
      const auto cfg = resolve_config(val_c);
      std::cout << to_ini(cfg);
      std::cerr << "config is valid\n";
      return 0;
    }

    if (*gen) {
      const auto cfg = resolve_config(gen_c);
      spec.pattern = parse_pattern(pattern);
      spec.seed = cfg.seed;
      const auto traffic = generate_traffic(spec, cfg);
      std::ostringstream os;
      os << "# pattern=" << pattern << " rate=" << spec.rate << " seed=" << cfg.seed << " rng=mt19937_64\n";
      for (const auto& w : traffic.warnings) {
        os << "# warning: " << w << "\n";
        std::cerr << "warning: " << w << "\n";
      }
      for (const auto& e : traffic.trace) os << to_trace_line(e) << "\n";
      emit(gen_output, os.str());
      return 0;
    }

    const auto cfg = resolve_config(run_c);
    if (experiment.empty() == workload.empty()) throw UsageError("run needs exactly one of --experiment or --workload");
    std::vector<std::string> names;
    if (experiment == "all") {
      names = experiment_names();
    } else if (!experiment.empty()) {
      names = {experiment};
    }
    const auto trace = workload.empty() ? std::vector<TraceEntry>{} : read_trace(workload);

    // One report per (repeat, experiment), filled by independent threads.
    const std::size_t per = workload.empty() ? names.size() : 1;
    std::vector<Report> reports(static_cast<std::size_t>(repeat) * per);
    std::vector<std::string> errors(reports.size());
    std::vector<std::thread> pool;
    for (int k = 0; k < repeat; ++k) {
      auto c = cfg;
      c.seed = cfg.seed + static_cast<std::uint64_t>(k);
      pool.emplace_back([&, c, k] {
        for (std::size_t i = 0; i < per; ++i) {
          const auto slot = static_cast<std::size_t>(k) * per + i;
          try {
            reports[slot] = workload.empty() ? run_experiment(names[i], c, params) : run_trace(trace, c, params);
          } catch (const std::exception& e) {
            errors[slot] = e.what();
          }
        }
      });
      if (pool.size() >= std::max(1u, std::thread::hardware_concurrency())) {
        for (auto& t : pool) t.join();
        pool.clear();
      }
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (!e.empty()) throw UsageError(e);
    }

    std::string text;
    if (format == "json") {
      text = reports.size() == 1 ? to_json(reports[0]) : to_json(reports);
    } else {
      for (std::size_t i = 0; i < reports.size(); ++i) text += (i ? "\n" : "") + to_csv(reports[i]);
    }
    emit(output, text);
    bool drained = true;
    for (const auto& r : reports) {
      drained = drained && r.drained;
      for (const auto& w : r.warnings) std::cerr << r.experiment << ": " << w << "\n";
    }
    return drained ? 0 : kNotDrained;
  } catch (const ConfigFileError& e) {
    for (const auto& d : e.diagnostics()) std::cerr << d << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
