#include "dnp/bench/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dnp/packet.hpp"
#include "dnp/routing.hpp"

namespace dnp::bench {

Pattern parse_pattern(const std::string& name) {
  if (name == "uniform_random") return Pattern::UniformRandom;
  if (name == "nearest_neighbor_3d") return Pattern::NearestNeighbor3D;
  if (name == "hotspot") return Pattern::Hotspot;
  throw ConfigError("unknown traffic pattern '" + name + "' (uniform_random, nearest_neighbor_3d, hotspot)");
}

const char* to_string(Pattern p) {
  switch (p) {
    case Pattern::UniformRandom: return "uniform_random";
    case Pattern::NearestNeighbor3D: return "nearest_neighbor_3d";
    case Pattern::Hotspot: return "hotspot";
  }
  return "?";
}

std::uint32_t receive_base(const SimConfig& cfg) { return cfg.rdma.memory_words / 2; }

namespace {

double flits_of(std::uint32_t words) {
  const std::size_t packets = (words + kMaxPayloadWords - 1) / kMaxPayloadWords;
  return static_cast<double>(words + packets * kEnvelopeWords);
}

// Mean lattice hops from one tile to all others (every tile sees the same on a torus).
double mean_hops(const Topology& topo) {
  const auto& l = topo.spec().lattice;
  double total = 0;
  for (auto id : topo.ids()) {
    const auto c = topo.coord(id);
    for (int d = 0; d < 3; ++d) total += ring_step(0, c[d], l[static_cast<std::size_t>(d)]).hops;
  }
  return total / static_cast<double>(std::max<std::size_t>(1, topo.tile_count() - 1));
}

}  // namespace

Traffic generate_traffic(const TrafficSpec& spec, const SimConfig& cfg) {
  if (spec.rate <= 0) throw ConfigError("traffic rate must be positive");
  if (spec.min_words < 1 || spec.max_words < spec.min_words) throw ConfigError("traffic sizes must satisfy 1 <= min <= max");
  const Topology topo(cfg.topology);
  const auto n = topo.tile_count();
  if (n < 2) throw ConfigError("traffic needs at least two tiles");
  if (spec.pattern == Pattern::Hotspot && spec.hotspot >= n) throw ConfigError("hotspot tile out of range");

  Traffic out;
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<std::uint32_t> size(spec.min_words, spec.max_words);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::uint32_t base = receive_base(cfg);
  const std::uint32_t span = cfg.rdma.memory_words - base;
  if (spec.max_words > span) throw ConfigError("traffic payload larger than the receive region");
  std::vector<std::uint32_t> offset(n, 0);  // next write offset per destination
  std::uint32_t tag = 0;

  auto put = [&](std::size_t s, std::size_t d, std::uint32_t len, double at) {
    if (offset[d] + len > span) offset[d] = 0;
    RdmaCommand c;
    c.code = CommandCode::Put;
    c.src_dnp = topo.ids()[s];
    c.dst_dnp = topo.ids()[d];
    c.src_addr = 0;
    c.dst_addr = base + offset[d];
    c.length = len;
    c.tag = tag++;
    offset[d] += len;
    out.trace.push_back({static_cast<Cycle>(at), c.src_dnp, c.encode()});
  };
  // Exponential gaps so the offered load per source is `rate` flits per cycle.
  auto gap = [&](std::uint32_t len) { return -std::log(1.0 - unit(rng)) * flits_of(len) / spec.rate; };

  const int links = 2 * cfg.topology.torus_dims_used();
  const double W = cfg.link.word_cycles();
  switch (spec.pattern) {
    case Pattern::UniformRandom: {
      std::vector<double> t(n, 0.0);
      for (std::uint32_t k = 0; k < spec.packets; ++k) {
        const std::size_t s = rng() % n;
        std::size_t d = rng() % (n - 1);
        if (d >= s) ++d;
        const auto len = size(rng);
        t[s] += gap(len);
        put(s, d, len, t[s]);
      }
      out.capacity = links > 0 ? links / (W * std::max(1.0, mean_hops(topo))) : 1.0;
      break;
    }
    case Pattern::Hotspot: {
      std::vector<double> t(n, 0.0);
      for (std::uint32_t k = 0; k < spec.packets; ++k) {
        std::size_t s = rng() % (n - 1);
        if (s >= spec.hotspot) ++s;
        const auto len = size(rng);
        t[s] += gap(len);
        put(s, spec.hotspot, len, t[s]);
      }
      const double sink = links > 0 ? std::min(links / W, static_cast<double>(cfg.topology.L))
                                    : static_cast<double>(cfg.topology.L);
      out.capacity = sink / static_cast<double>(n - 1);
      break;
    }
    case Pattern::NearestNeighbor3D: {
      if (links == 0) throw ConfigError("nearest_neighbor_3d needs an off-chip lattice");
      double t = 0;
      for (int r = 0; r < spec.rounds; ++r) {
        double round_flits = 0;
        std::vector<std::uint32_t> lens;
        for (std::size_t s = 0; s < n; ++s) {
          for (const auto& nb : topo.neighbors(topo.ids()[s])) {
            const auto len = size(rng);
            put(s, topo.index_of(nb.id), len, t);
            lens.push_back(len);
          }
        }
        for (auto len : lens) round_flits += flits_of(len);
        t += round_flits / static_cast<double>(n) / spec.rate;
      }
      out.capacity = links / W;
      break;
    }
  }
  if (spec.rate > out.capacity) {
    out.warnings.push_back("offered rate " + std::to_string(spec.rate) + " flits/cycle/tile exceeds the estimated capacity of " +
                           std::to_string(out.capacity));
  }
  std::stable_sort(out.trace.begin(), out.trace.end(), [&](const TraceEntry& a, const TraceEntry& b) {
    if (a.cycle != b.cycle) return a.cycle < b.cycle;
    return topo.index_of(a.tile) < topo.index_of(b.tile);
  });
  return out;
}

}  // namespace dnp::bench
