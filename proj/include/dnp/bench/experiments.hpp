#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dnp/bench/report.hpp"
#include "dnp/bench/traffic.hpp"
#include "dnp/config.hpp"
#include "dnp/rdma.hpp"

namespace dnp::bench {

// Bad experiment name or a config the experiment cannot use.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentParams {
  std::vector<std::uint32_t> sizes;  // payload words; empty selects the experiment default
  std::vector<double> bers;          // fault_injection_sweep; empty selects the default sweep
  std::string pattern = "uniform_random";
  double rate = 0.05;
  std::uint32_t packets = 2000;
  std::uint32_t min_words = 1;
  std::uint32_t max_words = 16;
  Cycle max_cycles = 50'000'000;
  bool trace = false;  // add a per-packet table
};

const std::vector<std::string>& experiment_names();

// Runs the scenario on fresh simulators seeded from cfg.seed.
Report run_experiment(const std::string& name, const SimConfig& cfg, const ExperimentParams& p = {});

// Replays a command trace. Every tile gets one LUT entry over its whole memory.
Report run_trace(const std::vector<TraceEntry>& trace, const SimConfig& cfg, const ExperimentParams& p = {});

}  // namespace dnp::bench
