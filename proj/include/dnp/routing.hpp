#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dnp/address.hpp"
#include "dnp/config.hpp"

namespace dnp {

// Lattice directions, in off-chip port order.
enum class Dir : int { XPlus = 0, XMinus, YPlus, YMinus, ZPlus, ZMinus };
inline constexpr int kDirs = 6;

inline int dir_dim(Dir d) { return static_cast<int>(d) / 2; }
inline bool dir_positive(Dir d) { return static_cast<int>(d) % 2 == 0; }
inline Dir make_dir(int dim, bool positive) { return static_cast<Dir>(2 * dim + (positive ? 0 : 1)); }
inline Dir opposite(Dir d) { return make_dir(dir_dim(d), !dir_positive(d)); }
const char* to_string(Dir d);

enum class PortClass { Intra, OnChip, OffChip };

// Port numbering of one DNP: [0, L) intra-tile, [L, L+N) on-chip, [L+N, L+N+M) off-chip.
struct PortLayout {
  int L = 2;
  int N = 1;
  int M = 6;

  int total() const { return L + N + M; }
  PortClass cls(int port) const;
  int onchip(int i) const { return L + i; }
  int offchip(Dir d) const { return L + N + static_cast<int>(d); }
  std::optional<Dir> dir_of(int port) const;
  std::string name(int port) const;
};

// Ring direction and hop count of the shortest path from a to b on a ring of
// size k; ties go to the positive direction.
struct RingStep {
  bool positive;
  int hops;
};
RingStep ring_step(int a, int b, int k);

// Highest-priority lattice dimension where the chip coordinates differ, and
// the direction to take; nullopt when the chip coordinates already match.
// `prio[0]` is the dimension corrected first.
std::optional<Dir> lattice_direction(const Coord& cur, const Coord& dest, const std::array<int, 3>& sizes,
                                     const std::array<int, 3>& prio);

// True when the hop from coordinate c toward `positive` crosses the wrap link
// of a ring of size k.
inline bool crosses_wrap(int c, bool positive, int k) { return positive ? c == k - 1 : c == 0; }

// On-chip 2D mesh: tile w sits at (w % width, w / width); XY order, no wrap.
enum class MeshDir : int { East = 0, West, South, North };
struct MeshShape {
  int width = 4;
  int tiles = 8;
  int height() const { return (tiles + width - 1) / width; }
  std::optional<int> neighbor(int w, MeshDir d) const;
  // Directions with a neighbor, in E, W, S, N order; index = on-chip port slot.
  std::vector<MeshDir> port_dirs(int w) const;
  std::optional<MeshDir> next_hop(int from, int to) const;
};

struct RouteDecision {
  int port = 0;
  int vc = 0;
  bool local = false;
};

// Static routing of one DNP. Torus dimensions are corrected first in the
// configured priority, then the on-chip coordinate.
class Router {
 public:
  Router(const TopologySpec& topo, const AddressLayout& layout, DnpId self, int offchip_vcs);

  DnpId self() const { return self_; }
  const PortLayout& ports() const { return ports_; }
  // Ejection port used for local delivery of a packet arriving on in_port.
  int ejection_port(int in_port) const { return in_port % ports_.L; }
  // Throws RangeError when dest is outside the lattice.
  RouteDecision route(DnpId dest, int in_port, int in_vc, const std::array<int, 3>& prio) const;

 private:
  TopologySpec topo_;
  AddressLayout layout_;
  DnpId self_;
  Coord here_;
  PortLayout ports_;
  int offchip_vcs_;
  MeshShape mesh_;
  std::array<int, 4> mesh_port_{-1, -1, -1, -1};  // MeshDir -> on-chip port slot
};

}  // namespace dnp
