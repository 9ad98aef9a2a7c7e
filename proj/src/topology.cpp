#include "dnp/topology.hpp"

namespace dnp {

namespace {
AddressLayout make_layout(const TopologySpec& s) {
  std::string msg;
  for (auto& v : s.violations()) msg += "\n  - " + v;
  if (!msg.empty()) throw ConfigError("invalid topology:" + msg);
  return s.tiles_per_chip > 1 ? AddressLayout::torus3d_tiles(s.lattice, s.tiles_per_chip)
                              : AddressLayout::torus3d(s.lattice);
}
}  // namespace

Topology::Topology(const TopologySpec& spec) : spec_(spec), layout_(make_layout(spec)) {
  for (std::size_t i = 0; i < layout_.node_count(); ++i) ids_.push_back(layout_.encode(layout_.coord_at(i)));
}

std::size_t Topology::index_of(DnpId id) const {
  if (!layout_.contains(id)) throw RangeError("unknown DNP id " + std::to_string(id.raw()));
  return layout_.index_of(layout_.decode(id));
}

std::size_t Topology::chip_of(DnpId id) const {
  // Tiles are indexed with x fastest and the tile coordinate slowest.
  const auto c = coord(id);
  return static_cast<std::size_t>(c[0] + spec_.lattice[0] * (c[1] + spec_.lattice[1] * c[2]));
}

DnpId Topology::step(DnpId id, Dir d) const {
  auto c = coord(id);
  const int dim = dir_dim(d);
  const int k = spec_.lattice[static_cast<std::size_t>(dim)];
  c[dim] = (c[dim] + (dir_positive(d) ? 1 : k - 1)) % k;
  return layout_.encode(c);
}

std::vector<Neighbor> Topology::neighbors(DnpId id) const {
  index_of(id);
  std::vector<Neighbor> out;
  for (int d = 0; d < kDirs; ++d) {
    const Dir dir = static_cast<Dir>(d);
    if (spec_.lattice[static_cast<std::size_t>(dir_dim(dir))] < 2) continue;
    out.push_back({dir, step(id, dir)});
  }
  return out;
}

std::vector<OffChipWire> Topology::offchip_wires() const {
  std::vector<OffChipWire> out;
  for (auto id : ids_) {
    for (auto& n : neighbors(id)) out.push_back({id, n.dir, n.id});
  }
  return out;
}

std::vector<MeshWire> Topology::mesh_wires() const {
  std::vector<MeshWire> out;
  if (spec_.scheme != OnChipScheme::MT2D || spec_.tiles_per_chip < 2) return out;
  MeshShape mesh{spec_.mesh_width, spec_.tiles_per_chip};
  auto opposite_mesh = [](MeshDir d) {
    switch (d) {
      case MeshDir::East: return MeshDir::West;
      case MeshDir::West: return MeshDir::East;
      case MeshDir::South: return MeshDir::North;
      case MeshDir::North: return MeshDir::South;
    }
    return d;
  };
  auto slot_of = [&](int w, MeshDir d) {
    auto dirs = mesh.port_dirs(w);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      if (dirs[i] == d) return static_cast<int>(i);
    }
    return -1;
  };
  for (auto id : ids_) {
    auto c = coord(id);
    const int w = c[3];
    auto dirs = mesh.port_dirs(w);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      auto nc = c;
      nc[3] = *mesh.neighbor(w, dirs[i]);
      out.push_back({id, static_cast<int>(i), layout_.encode(nc), slot_of(nc[3], opposite_mesh(dirs[i]))});
    }
  }
  return out;
}

}  // namespace dnp
