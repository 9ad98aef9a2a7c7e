#pragma once

#include <vector>

#include "dnp/address.hpp"
#include "dnp/config.hpp"
#include "dnp/routing.hpp"

namespace dnp {

struct Neighbor {
  Dir dir;
  DnpId id;
};

// One direction of an off-chip link: leaves `from` through port `dir` and
// enters `to` through port opposite(dir).
struct OffChipWire {
  DnpId from;
  Dir dir;
  DnpId to;
};

// One direction of an MT2D mesh link, by on-chip port slot.
struct MeshWire {
  DnpId from;
  int from_slot;
  DnpId to;
  int to_slot;
};

class Topology {
 public:
  // Throws ConfigError when the topology violates a constraint.
  explicit Topology(const TopologySpec& spec);

  const TopologySpec& spec() const { return spec_; }
  const AddressLayout& layout() const { return layout_; }
  std::size_t tile_count() const { return ids_.size(); }
  const std::vector<DnpId>& ids() const { return ids_; }
  // Dense tile index; throws RangeError for an id that is not a tile.
  std::size_t index_of(DnpId id) const;
  Coord coord(DnpId id) const { return layout_.decode(id); }
  std::size_t chip_count() const { return tile_count() / static_cast<std::size_t>(spec_.tiles_per_chip); }
  std::size_t chip_of(DnpId id) const;

  // Lattice neighbors; dimensions of size 1 have none.
  std::vector<Neighbor> neighbors(DnpId id) const;
  DnpId step(DnpId id, Dir d) const;

  std::vector<OffChipWire> offchip_wires() const;
  std::vector<MeshWire> mesh_wires() const;

 private:
  TopologySpec spec_;
  AddressLayout layout_;
  std::vector<DnpId> ids_;
};

}  // namespace dnp
