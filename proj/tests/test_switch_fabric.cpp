#include <doctest.h>

#include <functional>
#include <map>
#include <random>
#include <set>

#include "dnp/registers.hpp"
#include "dnp/routing.hpp"
#include "dnp/topology.hpp"
#include "switch_harness.hpp"

using namespace dnp;
using namespace dnp::testing;

namespace {

Coord c3(int x, int y, int z) {
  Coord c;
  c.v = {x, y, z, 0};
  return c;
}

// Shortest ring distance by walking both ways.
std::pair<int, int> walk_distances(int a, int b, int k) {
  int fwd = 0;
  for (int p = a; p != b; p = (p + 1) % k) ++fwd;
  int back = 0;
  for (int p = a; p != b; p = (p + k - 1) % k) ++back;
  return {fwd, back};
}

}  // namespace

TEST_CASE("ring step matches a walking oracle, ties go positive") {
  for (int k = 1; k <= 9; ++k) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        auto [fwd, back] = walk_distances(a, b, k);
        auto s = ring_step(a, b, k);
        CHECK(s.hops == std::min(fwd, back));
        CHECK(s.positive == (fwd <= back));
      }
    }
  }
}

TEST_CASE("lattice direction follows the configured dimension priority") {
  const std::array<int, 3> zyx{2, 1, 0};
  const std::array<int, 3> xyz{0, 1, 2};
  CHECK(lattice_direction(c3(0, 0, 0), c3(1, 1, 1), {2, 2, 2}, zyx) == Dir::ZPlus);
  CHECK(lattice_direction(c3(0, 0, 0), c3(1, 1, 1), {2, 2, 2}, xyz) == Dir::XPlus);
  CHECK(lattice_direction(c3(0, 0, 0), c3(3, 0, 0), {4, 1, 1}, zyx) == Dir::XMinus);
  CHECK(lattice_direction(c3(0, 0, 0), c3(2, 0, 0), {4, 1, 1}, zyx) == Dir::XPlus);
  CHECK_FALSE(lattice_direction(c3(1, 2, 3), c3(1, 2, 3), {4, 4, 4}, zyx));
}

TEST_CASE("dimension-order paths are minimal and never revisit a corrected dimension") {
  std::mt19937_64 rng(7);
  const std::array<std::array<int, 3>, 3> shapes{{{4, 4, 4}, {5, 3, 2}, {2, 2, 2}}};
  std::array<int, 3> prio{0, 1, 2};
  for (auto sizes : shapes) {
    for (int trial = 0; trial < 400; ++trial) {
      std::shuffle(prio.begin(), prio.end(), rng);
      Coord a, b;
      for (int d = 0; d < 3; ++d) {
        a[d] = static_cast<int>(rng() % static_cast<std::uint64_t>(sizes[static_cast<std::size_t>(d)]));
        b[d] = static_cast<int>(rng() % static_cast<std::uint64_t>(sizes[static_cast<std::size_t>(d)]));
      }
      int expected = 0;
      for (int d = 0; d < 3; ++d) expected += ring_step(a[d], b[d], sizes[static_cast<std::size_t>(d)]).hops;
      Coord cur = a;
      std::set<int> done;
      int hops = 0;
      while (auto dir = lattice_direction(cur, b, sizes, prio)) {
        const int d = dir_dim(*dir);
        CHECK(done.count(d) == 0);
        const int k = sizes[static_cast<std::size_t>(d)];
        cur[d] = (cur[d] + (dir_positive(*dir) ? 1 : k - 1)) % k;
        if (cur[d] == b[d]) done.insert(d);
        ++hops;
        REQUIRE(hops <= 64);
      }
      CHECK(hops == expected);
    }
  }
}

TEST_CASE("dateline: VC 1 only after the wrap link of the current ring") {
  TopologySpec t;
  t.lattice = {4, 1, 1};
  t.N = 0;
  t.M = 6;
  Topology topo(t);
  auto route_path = [&](int from, int to) {
    std::vector<int> vcs;
    int x = from;
    int in_port = 0;
    int in_vc = 0;
    const DnpId dest = topo.layout().encode(c3(to, 0, 0));
    while (true) {
      Router r(t, topo.layout(), topo.layout().encode(c3(x, 0, 0)), 2);
      auto d = r.route(dest, in_port, in_vc, {2, 1, 0});
      if (d.local) break;
      vcs.push_back(d.vc);
      const auto dir = *r.ports().dir_of(d.port);
      x = (x + (dir_positive(dir) ? 1 : 3)) % 4;
      in_port = r.ports().offchip(opposite(dir));
      in_vc = d.vc;
    }
    return vcs;
  };
  CHECK(route_path(0, 2) == std::vector<int>{0, 0});
  CHECK(route_path(3, 1) == std::vector<int>{1, 1});  // 3 -> 0 wraps, then stays on VC 1
  CHECK(route_path(2, 0) == std::vector<int>{0, 1});
  CHECK(route_path(0, 3) == std::vector<int>{1});     // 0 -> 3 backwards over the wrap
  CHECK(route_path(1, 0) == std::vector<int>{0});
}

TEST_CASE("channel dependency graph of dateline dimension-order routing is acyclic") {
  // Channels are (node, output direction, vc). A packet holding channel c and
  // requesting c' adds the edge c -> c'. Deadlock freedom needs no cycle.
  for (auto sizes : {std::array<int, 3>{4, 4, 1}, std::array<int, 3>{5, 3, 2}, std::array<int, 3>{2, 2, 2}}) {
    TopologySpec t;
    t.lattice = sizes;
    t.N = 0;
    Topology topo(t);
    using Chan = std::tuple<std::uint32_t, int, int>;
    std::map<Chan, std::set<Chan>> edges;
    for (auto src : topo.ids()) {
      for (auto dst : topo.ids()) {
        DnpId at = src;
        int in_port = 0, in_vc = 0;
        std::optional<Chan> held;
        for (int guard = 0; guard < 64; ++guard) {
          Router r(t, topo.layout(), at, 2);
          auto d = r.route(dst, in_port, in_vc, {2, 1, 0});
          if (d.local) break;
          const auto dir = *r.ports().dir_of(d.port);
          Chan c{at.raw(), static_cast<int>(dir), d.vc};
          if (held) edges[*held].insert(c);
          held = c;
          at = topo.step(at, dir);
          in_port = r.ports().offchip(opposite(dir));
          in_vc = d.vc;
        }
      }
    }
    std::map<Chan, int> color;
    std::function<bool(const Chan&)> cyclic = [&](const Chan& c) {
      color[c] = 1;
      for (const auto& n : edges[c]) {
        if (color[n] == 1) return true;
        if (color[n] == 0 && cyclic(n)) return true;
      }
      color[c] = 2;
      return false;
    };
    bool found = false;
    for (const auto& [c, _] : edges) {
      if (color[c] == 0 && cyclic(c)) found = true;
    }
    CHECK_FALSE(found);
  }
}

TEST_CASE("routing is a pure function of (current, destination, priority)") {
  auto cfg = presets::torus(4, 4, 4);
  Topology topo(cfg.topology);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    auto here = topo.ids()[rng() % topo.tile_count()];
    auto dest = topo.ids()[rng() % topo.tile_count()];
    Router a(cfg.topology, topo.layout(), here, 2);
    Router b(cfg.topology, topo.layout(), here, 2);
    auto r1 = a.route(dest, 0, 0, {0, 2, 1});
    auto r2 = b.route(dest, 0, 0, {0, 2, 1});
    CHECK(r1.port == r2.port);
    CHECK(r1.vc == r2.vc);
  }
  Router r(cfg.topology, topo.layout(), topo.ids()[0], 2);
  CHECK_THROWS_AS(r.route(DnpId(0x3FFFF), 0, 0, {2, 1, 0}), RangeError);
}

TEST_CASE("MT2D mesh: XY hops over a 2x4 non-wrapping mesh") {
  MeshShape m{4, 8};
  CHECK(m.height() == 2);
  CHECK(m.port_dirs(0).size() == 2);
  CHECK(m.port_dirs(1).size() == 3);
  CHECK(m.port_dirs(7).size() == 2);
  CHECK_FALSE(m.neighbor(3, MeshDir::East));
  CHECK(m.neighbor(3, MeshDir::South) == std::optional<int>(7));
  CHECK(m.next_hop(0, 7) == MeshDir::East);
  CHECK(m.next_hop(3, 7) == MeshDir::South);
  CHECK_FALSE(m.next_hop(5, 5));
  // every walk reaches its target in Manhattan distance
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      int at = a, hops = 0;
      while (auto d = m.next_hop(at, b)) {
        at = *m.neighbor(at, *d);
        ++hops;
      }
      CHECK(at == b);
      CHECK(hops == std::abs(a % 4 - b % 4) + std::abs(a / 4 - b / 4));
    }
  }
}

TEST_CASE("register file: staged writes, priority encoding, invalid values") {
  SwitchConfig sw;
  RegisterFile r(sw, 9);
  CHECK(reg::decode_priority(reg::encode_priority({1, 0, 2})) == std::optional<std::array<int, 3>>({1, 0, 2}));
  CHECK_FALSE(reg::decode_priority(reg::encode_priority({1, 1, 2})));
  CHECK(r.dim_priority() == std::array<int, 3>{2, 1, 0});
  CHECK(r.write(reg::kDimPriority, reg::encode_priority({0, 1, 2})));
  CHECK(r.dim_priority() == std::array<int, 3>{2, 1, 0});  // not yet
  r.commit();
  CHECK(r.dim_priority() == std::array<int, 3>{0, 1, 2});
  CHECK_FALSE(r.write(reg::kDimPriority, 0));  // 0,0,0 is not a permutation
  CHECK((r.status() & reg::kStatusRejectedWrite) != 0);
  CHECK_FALSE(r.write(reg::kStatus, 1));
  CHECK(r.port_enabled(8));
  CHECK(r.write(reg::kPortEnable, 0x0F));
  r.commit();
  CHECK_FALSE(r.port_enabled(8));
  CHECK(r.write(reg::kSoftReset, 1));
  r.commit();
  CHECK(r.status() == 0);
}

TEST_CASE("switch: an uncontended packet streams one flit per cycle after head setup") {
  auto topo = crossbar_topology();
  Coord here;
  here.dims = 4;
  here.v = {1, 1, 1, 0};
  SwitchHarness h(topo, here);
  Coord dest = here;
  dest[0] = 2;
  h.feed(0, packet_flits(h.layout().encode(dest), h.self(), 20));
  h.run(80);
  const auto& got = h.sink(h.sw().ports().offchip(Dir::XPlus)).got;
  REQUIRE(got.size() == 26);
  CHECK(got[0].cycle == 19);  // header routing latency from arrival at cycle 0
  for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i].cycle == got[i - 1].cycle + 1);
  CHECK(got.back().flit.kind == FlitKind::Tail);
}

TEST_CASE("switch: packets sharing an output never interleave") {
  auto topo = crossbar_topology();
  Coord here;
  here.dims = 4;
  here.v = {1, 1, 1, 0};
  SwitchHarness h(topo, here);
  Coord dest = here;
  dest[1] = 2;
  const DnpId d = h.layout().encode(dest);
  const int out = h.sw().ports().offchip(Dir::YPlus);
  for (int in : {0, 2, 3, 4}) h.feed(in, packet_flits(d, h.self(), 30, static_cast<std::uint32_t>(in)));
  h.run(400);
  const auto& got = h.sink(out).got;
  REQUIRE(got.size() == 4 * 36);
  for (std::size_t p = 0; p < 4; ++p) {
    const auto tag = got[p * 36 + kHeaderWords].flit.word >> 16;
    CHECK(got[p * 36].flit.kind == FlitKind::Head);
    CHECK(got[p * 36 + 35].flit.kind == FlitKind::Tail);
    for (std::size_t i = kHeaderWords; i < 35; ++i) CHECK((got[p * 36 + i].flit.word >> 16) == tag);
  }
}

TEST_CASE("round-robin rotates contending inputs; fixed priority favours the lowest port") {
  for (auto policy : {ArbitrationPolicy::RoundRobin, ArbitrationPolicy::FixedPriority}) {
    auto topo = crossbar_topology();
    Coord here;
    here.dims = 4;
    here.v = {1, 1, 1, 0};
    SwitchConfig sc;
    sc.arbitration = policy;
    SwitchHarness h(topo, here, sc);
    Coord dest = here;
    dest[2] = 2;
    const DnpId d = h.layout().encode(dest);
    // Packets long enough that the next head of every input is routed and
    // waiting by the time the output frees up.
    for (int k = 0; k < 10; ++k) {
      for (std::uint32_t in : {3u, 4u, 5u}) h.feed(static_cast<int>(in), packet_flits(d, h.self(), 30, in));
    }
    h.run(2500);
    const auto& got = h.sink(h.sw().ports().offchip(Dir::ZPlus)).got;
    std::vector<int> order;
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].flit.kind == FlitKind::Head && got[i].flit.index == 0) {
        order.push_back(static_cast<int>(got[i + kHeaderWords].flit.word >> 16));
      }
    }
    REQUIRE(order.size() == 30);
    if (policy == ArbitrationPolicy::RoundRobin) {
      for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i] == 3 + static_cast<int>(i % 3));
    } else {
      // each input keeps the output until it runs dry
      for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i] == 3 + static_cast<int>(i / 10));
    }
  }
}

TEST_CASE("crossbar: L+N+M disjoint flows move in the same cycle") {
  auto topo = crossbar_topology();
  Coord here;
  here.dims = 4;
  here.v = {1, 1, 1, 0};
  SwitchHarness h(topo, here);
  for (auto [in, dest] : crossbar_flows()) h.feed(in, packet_flits(h.layout().encode(dest), h.self(), 200));
  h.run(300);
  const auto& m = h.moves_per_cycle();
  CHECK(*std::max_element(m.begin(), m.end()) == 9);
  const auto full = std::count(m.begin(), m.end(), 9);
  CHECK(full >= 150);
}

TEST_CASE("credit backpressure: a stalled output holds flits, nothing is lost") {
  auto topo = crossbar_topology();
  Coord here;
  here.dims = 4;
  here.v = {1, 1, 1, 0};
  SwitchConfig sc;
  sc.timeout_cycles = 100;
  SwitchHarness h(topo, here, sc);
  const int out = h.sw().ports().offchip(Dir::XPlus);
  h.sink(out).auto_credit = false;
  Coord dest = here;
  dest[0] = 2;
  h.feed(0, packet_flits(h.layout().encode(dest), h.self(), 100));
  h.run(400);
  const auto depth = static_cast<std::size_t>(h.sw().depth(out));
  CHECK(h.sink(out).got.size() == depth);
  CHECK((h.sw().regs().status() & reg::kStatusTimeout) != 0);
  // release credits: the rest follows
  h.sink(out).auto_credit = true;
  for (std::size_t i = 0; i < depth; ++i) h.sw().return_credit(out, 0);
  h.run(400);
  CHECK(h.sink(out).got.size() == 106);
}

TEST_CASE("switch: both VCs of a port carry packets independently") {
  auto topo = crossbar_topology();
  topo.lattice = {4, 1, 1};
  topo.tiles_per_chip = 1;
  topo.scheme = OnChipScheme::None;
  topo.N = 0;
  Coord here = c3(0, 0, 0);
  SwitchHarness h(topo, here);
  // from X- input on VC1 (past the dateline) heading +X, and a fresh packet from intra
  const DnpId d = h.layout().encode(c3(2, 0, 0));
  h.feed(h.sw().ports().offchip(Dir::XMinus), packet_flits(d, h.self(), 40, 1), 1);
  h.feed(0, packet_flits(d, h.self(), 40, 2));
  h.run(300);
  const auto& got = h.sink(h.sw().ports().offchip(Dir::XPlus)).got;
  REQUIRE(got.size() == 92);
  std::map<int, std::vector<Word>> by_vc;
  for (const auto& g : got) {
    if (g.flit.kind == FlitKind::Body) by_vc[g.vc].push_back(g.flit.word >> 16);
  }
  CHECK(by_vc[1] == std::vector<Word>(40, 1));
  CHECK(by_vc[0] == std::vector<Word>(40, 2));
}
