#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dnp/types.hpp"

namespace dnp {

enum class OnChipScheme { None, MTNoC, MT2D };
enum class ArbitrationPolicy { RoundRobin, FixedPriority };

const char* to_string(OnChipScheme s);
const char* to_string(ArbitrationPolicy p);

// Stage latencies in cycles. Individual values are a calibration; only their
// sums are observable end to end.
struct TimingConfig {
  int cmd_issue_to_read = 70;    // L1: command in CMD FIFO -> first intra-tile read
  int switch_inject = 30;        // L2: read start -> first header word at the inter-tile interface
  int serdes_transit = 120;      // L3: off-chip link transit for a minimal (1-word) packet
  int deliver_to_write = 30;     // L4: word at destination interface -> intra-tile write
  int loopback_turnaround = 30;  // LOOPBACK read -> write
  int forward_pipeline = 19;     // header routing at a DNP forwarding toward a network port
  int onchip_link_latency = 1;   // MT2D point-to-point link
  int noc_latency = 2;           // MTNoC abstract transport, ingress to egress
  double clock_mhz = 500.0;      // display only

  double ns(double cycles) const { return cycles * 1000.0 / clock_mhz; }
};

struct SwitchConfig {
  int onchip_vc_depth = 8;
  int offchip_vc_depth = 32;
  int intra_vc_depth = 8;
  int offchip_vcs = 2;
  ArbitrationPolicy arbitration = ArbitrationPolicy::RoundRobin;
  std::array<int, 3> dim_priority{2, 1, 0};  // highest first: Z, then Y, then X
  std::uint32_t timeout_cycles = 20000;
};

struct LinkConfig {
  int serialization_factor = 16;
  bool ddr = true;
  int retry_limit = 8;
  double offchip_ber = 0.0;
  double onchip_ber = 0.0;

  // Payload bits moved per cycle on an off-chip link direction:
  // 32/S serial lines, two bits per line per cycle with DDR.
  double bits_per_cycle() const { return 32.0 / serialization_factor * (ddr ? 2.0 : 1.0); }
  int word_cycles() const;
};

struct RdmaConfig {
  int cmd_fifo_depth = 16;
  int cq_depth = 256;
  int lut_entries = 64;
  std::uint32_t memory_words = 1u << 20;
};

struct TopologySpec {
  std::array<int, 3> lattice{2, 2, 2};
  int tiles_per_chip = 1;
  OnChipScheme scheme = OnChipScheme::None;
  int mesh_width = 4;  // MT2D: tiles per mesh row
  int L = 2;
  int N = 1;
  int M = 6;

  int torus_dims_used() const;
  // Largest on-chip degree required by the scheme.
  int required_onchip_ports() const;
  // Human-readable list of violated constraints; empty when valid.
  std::vector<std::string> violations() const;
};

struct SimConfig {
  TopologySpec topology;
  TimingConfig timing;
  SwitchConfig sw;
  LinkConfig link;
  RdmaConfig rdma;
  std::uint64_t seed = 1;

  std::vector<std::string> violations() const;
  void validate() const;  // throws ConfigError listing every violation
};

namespace presets {
// 8 tiles on a 2x2x2 torus, L=2 N=1 M=6, one tile per chip.
SimConfig shapes();
// 2x2x2 chips, 8 tiles per chip joined by the abstract NoC.
SimConfig mtnoc();
// 2x2x2 chips, 8 tiles per chip on a 2x4 point-to-point mesh.
SimConfig mt2d();
// Generic torus of single-tile chips.
SimConfig torus(int x, int y, int z);
}  // namespace presets

}  // namespace dnp
