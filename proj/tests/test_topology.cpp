#include <doctest.h>

#include <set>

#include "dnp/config.hpp"
#include "dnp/topology.hpp"

using namespace dnp;

TEST_CASE("2x2x2 torus: 8 tiles, 24 bidirectional links, wrap links double up") {
  Topology t(presets::shapes().topology);
  CHECK(t.tile_count() == 8);
  const auto wires = t.offchip_wires();
  CHECK(wires.size() == 48);  // each direction of each link
  std::set<std::tuple<std::uint32_t, int>> seen;
  for (const auto& w : wires) {
    CHECK(seen.insert({w.from.raw(), static_cast<int>(w.dir)}).second);
    CHECK(t.step(w.from, w.dir) == w.to);
    CHECK(t.step(w.to, opposite(w.dir)) == w.from);
  }
  // for k = 2 the + and - neighbor is the same tile
  for (auto id : t.ids()) {
    for (int d = 0; d < 3; ++d) CHECK(t.step(id, make_dir(d, true)) == t.step(id, make_dir(d, false)));
  }
}

TEST_CASE("4x4x4 torus: six distinct neighbors, symmetric") {
  Topology t(presets::torus(4, 4, 4).topology);
  CHECK(t.tile_count() == 64);
  for (auto id : t.ids()) {
    const auto n = t.neighbors(id);
    REQUIRE(n.size() == 6);
    std::set<std::uint32_t> distinct;
    for (const auto& nb : n) {
      distinct.insert(nb.id.raw());
      CHECK(t.step(nb.id, opposite(nb.dir)) == id);
    }
    CHECK(distinct.size() == 6);
    CHECK(distinct.count(id.raw()) == 0);
  }
  CHECK(t.offchip_wires().size() == 64 * 6);
}

TEST_CASE("degenerate lattices: 1x1x1 has no links, size-1 dimensions are skipped") {
  Topology one(presets::torus(1, 1, 1).topology);
  CHECK(one.tile_count() == 1);
  CHECK(one.neighbors(one.ids()[0]).empty());
  CHECK(one.offchip_wires().empty());

  Topology ring(presets::torus(5, 1, 1).topology);
  CHECK(ring.offchip_wires().size() == 10);
  for (auto id : ring.ids()) CHECK(ring.neighbors(id).size() == 2);
}

TEST_CASE("dense ids: x fastest, tile-on-chip slowest; index_of inverts") {
  Topology t(presets::mtnoc().topology);
  CHECK(t.tile_count() == 64);
  CHECK(t.chip_count() == 8);
  for (std::size_t i = 0; i < t.tile_count(); ++i) {
    const auto id = t.ids()[i];
    CHECK(t.index_of(id) == i);
    const auto c = t.coord(id);
    CHECK(static_cast<std::size_t>(c[0] + 2 * c[1] + 4 * c[2] + 8 * c[3]) == i);
    CHECK(t.chip_of(id) == i % 8);
  }
  CHECK_THROWS_AS(t.index_of(DnpId(0x3FFFF)), RangeError);
}

TEST_CASE("MT2D: 4x2 mesh per chip, 10 bidirectional links per chip") {
  Topology t(presets::mt2d().topology);
  const auto wires = t.mesh_wires();
  CHECK(wires.size() == 8 * 20);
  for (const auto& w : wires) {
    CHECK(t.chip_of(w.from) == t.chip_of(w.to));
    bool back = false;
    for (const auto& v : wires) {
      if (v.from == w.to && v.to == w.from && v.from_slot == w.to_slot && v.to_slot == w.from_slot) back = true;
    }
    CHECK(back);
  }
}

TEST_CASE("invalid topologies are rejected") {
  auto bad = presets::mt2d().topology;
  bad.N = 1;  // a mesh interior tile needs 4 on-chip ports
  CHECK_THROWS_AS(Topology{bad}, ConfigError);
  auto zero = presets::shapes().topology;
  zero.lattice = {0, 2, 2};
  CHECK_THROWS_AS(Topology{zero}, ConfigError);
  auto toobig = presets::shapes().topology;
  toobig.lattice = {65, 1, 1};
  CHECK_THROWS_AS(Topology{toobig}, ConfigError);
}
