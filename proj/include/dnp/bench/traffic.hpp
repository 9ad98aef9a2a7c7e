#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dnp/config.hpp"
#include "dnp/rdma.hpp"
#include "dnp/topology.hpp"

namespace dnp::bench {

enum class Pattern { UniformRandom, NearestNeighbor3D, Hotspot };
Pattern parse_pattern(const std::string& name);  // throws ConfigError
const char* to_string(Pattern p);

struct TrafficSpec {
  Pattern pattern = Pattern::UniformRandom;
  double rate = 0.05;            // offered flits per cycle per sending tile
  std::uint32_t packets = 1000;  // PUT commands in total (uniform_random, hotspot)
  int rounds = 1;                // halo exchanges (nearest_neighbor_3d)
  std::uint32_t min_words = 1;
  std::uint32_t max_words = 16;
  std::size_t hotspot = 0;       // dense tile index of the hotspot
  std::uint64_t seed = 1;
};

struct Traffic {
  std::vector<TraceEntry> trace;  // sorted by cycle, then tile
  std::vector<std::string> warnings;
  double capacity = 0;  // sustainable flits per cycle per sending tile, first-order estimate
};

// All commands are PUTs from source address 0 into the upper half of the
// destination memory, which the caller must cover with a LUT entry.
Traffic generate_traffic(const TrafficSpec& spec, const SimConfig& cfg);

// Where generated traffic writes: [receive_base, memory_words).
std::uint32_t receive_base(const SimConfig& cfg);

}  // namespace dnp::bench
