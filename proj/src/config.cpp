#include "dnp/config.hpp"

#include <algorithm>
#include <cmath>

namespace dnp {

const char* to_string(OnChipScheme s) {
  switch (s) {
    case OnChipScheme::None: return "none";
    case OnChipScheme::MTNoC: return "mtnoc";
    case OnChipScheme::MT2D: return "mt2d";
  }
  return "?";
}

const char* to_string(ArbitrationPolicy p) {
  return p == ArbitrationPolicy::RoundRobin ? "round_robin" : "fixed_priority";
}

int LinkConfig::word_cycles() const {
  return static_cast<int>(std::lround(32.0 / bits_per_cycle()));
}

int TopologySpec::torus_dims_used() const {
  return static_cast<int>(std::count_if(lattice.begin(), lattice.end(), [](int s) { return s > 1; }));
}

int TopologySpec::required_onchip_ports() const {
  if (tiles_per_chip <= 1) return 0;
  if (scheme == OnChipScheme::MTNoC) return 1;
  if (scheme == OnChipScheme::MT2D) {
    const int w = std::min(mesh_width, tiles_per_chip);
    const int h = (tiles_per_chip + w - 1) / w;
    return (w > 2 ? 2 : w - 1) + (h > 2 ? 2 : h - 1);
  }
  return 0;
}

std::vector<std::string> TopologySpec::violations() const {
  std::vector<std::string> v;
  const bool tiled = tiles_per_chip > 1;
  const int max_dim = tiled ? 32 : 64;
  for (int d = 0; d < 3; ++d) {
    const int s = lattice[static_cast<std::size_t>(d)];
    if (s < 1 || s > max_dim) {
      v.push_back("lattice dimension " + std::to_string(d) + " = " + std::to_string(s) + " outside [1, " +
                  std::to_string(max_dim) + "]");
    }
  }
  if (tiles_per_chip < 1 || tiles_per_chip > 8) v.push_back("tiles_per_chip must be in [1, 8]");
  if (tiled && scheme == OnChipScheme::None) v.push_back("tiles_per_chip > 1 requires an on-chip scheme");
  if (scheme == OnChipScheme::MT2D && tiled) {
    if (mesh_width < 1 || tiles_per_chip % mesh_width != 0) {
      v.push_back("mesh_width must divide tiles_per_chip");
    }
  }
  if (L < 1) v.push_back("L must be >= 1 (at least one intra-tile master port)");
  if (L > 8) v.push_back("L must be <= 8");
  if (N < 0 || N > 8) v.push_back("N must be in [0, 8]");
  if (M < 0 || M > 6) v.push_back("M must be in [0, 6]");
  if (M < 2 * torus_dims_used()) {
    v.push_back("M = " + std::to_string(M) + " < 2 x " + std::to_string(torus_dims_used()) +
                " torus dimensions in use");
  }
  if (N < required_onchip_ports()) {
    v.push_back("N = " + std::to_string(N) + " < " + std::to_string(required_onchip_ports()) +
                " on-chip ports required by the " + to_string(scheme) + " scheme");
  }
  return v;
}

std::vector<std::string> SimConfig::violations() const {
  auto v = topology.violations();
  const auto& t = timing;
  auto nonneg = [&](int value, const char* name) {
    if (value < 0) v.push_back(std::string(name) + " must be non-negative");
  };
  nonneg(t.cmd_issue_to_read, "cmd_issue_to_read");
  nonneg(t.switch_inject, "switch_inject");
  nonneg(t.serdes_transit, "serdes_transit");
  nonneg(t.deliver_to_write, "deliver_to_write");
  nonneg(t.loopback_turnaround, "loopback_turnaround");
  nonneg(t.forward_pipeline, "forward_pipeline");
  nonneg(t.noc_latency, "noc_latency");
  if (t.onchip_link_latency < 1) v.push_back("onchip_link_latency must be >= 1");
  if (t.deliver_to_write < 1) v.push_back("deliver_to_write must be >= 1");
  if (t.switch_inject < t.forward_pipeline + 1) v.push_back("switch_inject must exceed forward_pipeline");
  if (t.clock_mhz <= 0) v.push_back("clock_mhz must be positive");
  if (link.serialization_factor < 1 || 32 % link.serialization_factor != 0) {
    v.push_back("serialization_factor must divide 32");
  }
  const int min_transit = (static_cast<int>(6) * std::max(1, link.word_cycles())) + 2;
  if (t.serdes_transit < min_transit) {
    v.push_back("serdes_transit must be >= " + std::to_string(min_transit) + " at this serialization factor");
  }
  if (link.retry_limit < 1) v.push_back("retry_limit must be >= 1");
  if (link.offchip_ber < 0 || link.offchip_ber > 0.5) v.push_back("offchip_ber must be in [0, 0.5]");
  if (link.onchip_ber < 0 || link.onchip_ber > 0.5) v.push_back("onchip_ber must be in [0, 0.5]");
  if (sw.onchip_vc_depth < 1 || sw.offchip_vc_depth < 1 || sw.intra_vc_depth < 1) {
    v.push_back("VC depths must be >= 1");
  }
  if (sw.offchip_vcs < 2 && topology.torus_dims_used() > 0) {
    v.push_back("offchip_vcs must be >= 2 for dateline deadlock avoidance on a torus");
  }
  if (sw.offchip_vcs > 4) v.push_back("offchip_vcs must be <= 4");
  auto p = sw.dim_priority;
  std::sort(p.begin(), p.end());
  if (p != std::array<int, 3>{0, 1, 2}) v.push_back("dimension priority must be a permutation of X, Y, Z");
  if (rdma.cmd_fifo_depth < 1) v.push_back("cmd_fifo_depth must be >= 1");
  if (rdma.cq_depth < 1) v.push_back("cq_depth must be >= 1");
  if (rdma.lut_entries < 1) v.push_back("lut_entries must be >= 1");
  if (rdma.memory_words < 1) v.push_back("memory_words must be >= 1");
  return v;
}

void SimConfig::validate() const {
  auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid configuration:";
  for (auto& s : v) msg += "\n  - " + s;
  throw ConfigError(msg);
}

namespace presets {

SimConfig shapes() {
  SimConfig c;
  c.topology.lattice = {2, 2, 2};
  c.topology.tiles_per_chip = 1;
  c.topology.scheme = OnChipScheme::MTNoC;
  c.topology.L = 2;
  c.topology.N = 1;
  c.topology.M = 6;
  return c;
}

SimConfig mtnoc() {
  SimConfig c = shapes();
  c.topology.tiles_per_chip = 8;
  c.topology.scheme = OnChipScheme::MTNoC;
  return c;
}

SimConfig mt2d() {
  SimConfig c = shapes();
  c.topology.tiles_per_chip = 8;
  c.topology.scheme = OnChipScheme::MT2D;
  c.topology.mesh_width = 4;
  c.topology.N = 3;
  return c;
}

SimConfig torus(int x, int y, int z) {
  SimConfig c;
  c.topology.lattice = {x, y, z};
  c.topology.scheme = OnChipScheme::None;
  c.topology.N = 0;
  return c;
}

}  // namespace presets
}  // namespace dnp
