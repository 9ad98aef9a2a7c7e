#include "dnp/routing.hpp"

namespace dnp {

const char* to_string(Dir d) {
  static constexpr const char* kNames[] = {"X+", "X-", "Y+", "Y-", "Z+", "Z-"};
  return kNames[static_cast<int>(d)];
}

PortClass PortLayout::cls(int port) const {
  if (port < L) return PortClass::Intra;
  if (port < L + N) return PortClass::OnChip;
  return PortClass::OffChip;
}

std::optional<Dir> PortLayout::dir_of(int port) const {
  if (cls(port) != PortClass::OffChip) return std::nullopt;
  return static_cast<Dir>(port - L - N);
}

std::string PortLayout::name(int port) const {
  switch (cls(port)) {
    case PortClass::Intra: return "intra" + std::to_string(port);
    case PortClass::OnChip: return "onchip" + std::to_string(port - L);
    case PortClass::OffChip: return to_string(*dir_of(port));
  }
  return "?";
}

RingStep ring_step(int a, int b, int k) {
  const int fwd = ((b - a) % k + k) % k;
  const int back = (k - fwd) % k;
  if (fwd <= back) return {true, fwd};
  return {false, back};
}

std::optional<Dir> lattice_direction(const Coord& cur, const Coord& dest, const std::array<int, 3>& sizes,
                                     const std::array<int, 3>& prio) {
  for (int d : prio) {
    if (cur[d] == dest[d]) continue;
    const auto step = ring_step(cur[d], dest[d], sizes[static_cast<std::size_t>(d)]);
    return make_dir(d, step.positive);
  }
  return std::nullopt;
}

std::optional<int> MeshShape::neighbor(int w, MeshDir d) const {
  const int u = w % width;
  const int v = w / width;
  int nu = u;
  int nv = v;
  switch (d) {
    case MeshDir::East: ++nu; break;
    case MeshDir::West: --nu; break;
    case MeshDir::South: ++nv; break;
    case MeshDir::North: --nv; break;
  }
  if (nu < 0 || nu >= width || nv < 0 || nv >= height()) return std::nullopt;
  const int n = nv * width + nu;
  if (n >= tiles) return std::nullopt;
  return n;
}

std::vector<MeshDir> MeshShape::port_dirs(int w) const {
  std::vector<MeshDir> out;
  for (auto d : {MeshDir::East, MeshDir::West, MeshDir::South, MeshDir::North}) {
    if (neighbor(w, d)) out.push_back(d);
  }
  return out;
}

std::optional<MeshDir> MeshShape::next_hop(int from, int to) const {
  const int fu = from % width, fv = from / width;
  const int tu = to % width, tv = to / width;
  if (fu != tu) return fu < tu ? MeshDir::East : MeshDir::West;
  if (fv != tv) return fv < tv ? MeshDir::South : MeshDir::North;
  return std::nullopt;
}

Router::Router(const TopologySpec& topo, const AddressLayout& layout, DnpId self, int offchip_vcs)
    : topo_(topo),
      layout_(layout),
      self_(self),
      here_(layout.decode(self)),
      ports_{topo.L, topo.N, topo.M},
      offchip_vcs_(offchip_vcs),
      mesh_{topo.mesh_width, topo.tiles_per_chip} {
  if (topo.scheme == OnChipScheme::MT2D && topo.tiles_per_chip > 1) {
    auto dirs = mesh_.port_dirs(here_[3]);
    for (std::size_t i = 0; i < dirs.size(); ++i) mesh_port_[static_cast<std::size_t>(dirs[i])] = static_cast<int>(i);
  }
}

RouteDecision Router::route(DnpId dest, int in_port, int in_vc, const std::array<int, 3>& prio) const {
  if (!layout_.contains(dest)) throw RangeError("destination outside the lattice");
  const Coord there = layout_.decode(dest);
  if (dest == self_) return {ejection_port(in_port), 0, true};

  if (auto dir = lattice_direction(here_, there, topo_.lattice, prio)) {
    const int d = dir_dim(*dir);
    const bool pos = dir_positive(*dir);
    int vc = 0;
    if (offchip_vcs_ > 1) {
      if (crosses_wrap(here_[d], pos, topo_.lattice[static_cast<std::size_t>(d)])) {
        vc = 1;
      } else if (auto in_dir = ports_.dir_of(in_port); in_dir && *in_dir == opposite(*dir) && in_vc == 1) {
        vc = 1;  // still travelling the same ring after the dateline
      }
    }
    return {ports_.offchip(*dir), vc, false};
  }

  // Same chip, different tile.
  if (topo_.scheme == OnChipScheme::MTNoC) return {ports_.onchip(0), 0, false};
  auto step = mesh_.next_hop(here_[3], there[3]);
  const int slot = mesh_port_[static_cast<std::size_t>(*step)];
  return {ports_.onchip(slot), 0, false};
}

}  // namespace dnp
