#include "dnp/bench/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>

#include "dnp/bench/config_file.hpp"
#include "dnp/simulator.hpp"

namespace dnp::bench {

namespace {

std::string hex_id(DnpId id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05x", id.raw());
  return buf;
}

std::string cyc(Cycle c) { return c == kNever ? "" : std::to_string(c); }

Word fill_word(std::size_t tile, std::uint32_t addr) {
  return static_cast<Word>((tile + 1) * 0x9E3779B1u ^ (addr * 0x85EBCA6Bu + 0x1234567u));
}

void fill_source(Simulator& sim, DnpId tile, std::uint32_t base, std::uint32_t len) {
  const auto t = sim.topology().index_of(tile);
  for (std::uint32_t i = 0; i < len; ++i) sim.memory(tile).write(base + i, fill_word(t, base + i));
}

bool same_data(Simulator& sim, DnpId a, std::uint32_t a_addr, DnpId b, std::uint32_t b_addr, std::uint32_t len) {
  return sim.memory(a).read_range(a_addr, len) == sim.memory(b).read_range(b_addr, len);
}

void open_memory(Simulator& sim) {
  for (std::size_t i = 0; i < sim.tile_count(); ++i) {
    sim.register_buffer(sim.id_at(i), 0, {0, sim.config().rdma.memory_words, true, true});
  }
}

RdmaCommand make(CommandCode code, DnpId src, DnpId dst, std::uint32_t len, std::uint32_t src_addr,
                 std::uint32_t dst_addr, std::uint32_t tag = 1) {
  RdmaCommand c;
  c.code = code;
  c.src_dnp = src;
  c.dst_dnp = dst;
  c.length = len;
  c.src_addr = src_addr;
  c.dst_addr = dst_addr;
  c.tag = tag;
  return c;
}

Report start(const std::string& name, const SimConfig& cfg) {
  Report r;
  r.experiment = name;
  r.seed = cfg.seed;
  r.config = config_entries(cfg);
  return r;
}

void add_packets(Report& r, const Simulator& sim, const std::string& label) {
  Table* t = nullptr;
  for (auto& x : r.tables) {
    if (x.name == "packets") t = &x;
  }
  if (!t) {
    t = &r.table("packets", {"run", "uid", "src", "dst", "kind", "msg_id", "seq", "payload", "hops", "issue",
                             "read_start", "head_injected", "head_on_link", "head_at_dest", "payload_at_dest",
                             "first_write", "tail_done", "errors_injected", "corrupted", "envelope_intact",
                             "event_status"});
  }
  for (const auto& p : sim.ledger().packets()) {
    t->add({label, std::to_string(p.uid), hex_id(p.src), hex_id(p.dst), to_string(p.kind), std::to_string(p.msg_id),
            std::to_string(p.seq), std::to_string(p.payload_len), std::to_string(p.hops), cyc(p.issue),
            cyc(p.read_start), cyc(p.head_injected), cyc(p.head_on_link), cyc(p.head_at_dest), cyc(p.payload_at_dest),
            cyc(p.first_write), cyc(p.tail_done), std::to_string(p.payload_errors_injected),
            p.corrupted_flag ? "1" : "0", p.envelope_intact ? "1" : "0", std::to_string(p.event_status)});
  }
}

// Runs to drain and folds the outcome into the report.
DrainResult settle(Report& r, Simulator& sim, const ExperimentParams& p, const std::string& label) {
  auto d = sim.run_until_drain(p.max_cycles);
  if (!d.drained) {
    r.drained = false;
    r.warnings.push_back(label + ": not drained after " + std::to_string(d.cycles) + " cycles" +
                         (d.stalled ? " (stalled)" : "") + "\n" + d.inventory);
  }
  if (!sim.ledger().conserved()) {
    r.conserved = false;
    r.warnings.push_back(label + ": flit or word conservation violated");
  }
  if (p.trace) add_packets(r, sim, label);
  return d;
}

std::vector<std::uint32_t> sizes_or(const ExperimentParams& p, std::vector<std::uint32_t> d) {
  auto s = p.sizes.empty() ? std::move(d) : p.sizes;
  for (auto x : s) {
    if (x == 0 || x > kMaxMessageWords) throw UsageError("payload size must be in [1, " + std::to_string(kMaxMessageWords) + "]");
  }
  return s;
}

int lattice_hops(const Topology& topo, DnpId a, DnpId b) {
  const auto ca = topo.coord(a), cb = topo.coord(b);
  int h = 0;
  for (int d = 0; d < 3; ++d) h += ring_step(ca[d], cb[d], topo.spec().lattice[static_cast<std::size_t>(d)]).hops;
  return h;
}

// The first tile, on the same on-chip position, `hops` lattice hops from tile 0.
DnpId tile_at_hops(const Topology& topo, int hops) {
  const DnpId a = topo.ids()[0];
  for (auto id : topo.ids()) {
    const auto c = topo.coord(id);
    if (c.dims == 4 && c[3] != 0) continue;
    if (lattice_hops(topo, a, id) == hops) return id;
  }
  throw UsageError("the lattice has no tile " + std::to_string(hops) + " off-chip hops from tile 0");
}

void require_memory(const SimConfig& cfg, std::uint32_t words) {
  if (words * 2 + 0x1000 > cfg.rdma.memory_words) throw UsageError("payload does not fit the tile memory");
}

struct PutRun {
  Cycle issue = 0;
  PacketRecord first;
  PacketRecord last;
  std::size_t packets = 0;
  bool intact = false;
};

PutRun one_put(Report& r, const SimConfig& cfg, std::size_t src_index, DnpId dst, std::uint32_t len,
               const ExperimentParams& p, const std::string& label) {
  require_memory(cfg, len);
  Simulator sim(cfg);
  open_memory(sim);
  const DnpId src = sim.id_at(src_index);
  fill_source(sim, src, 0, len);
  const std::uint32_t dst_addr = cfg.rdma.memory_words / 2;
  sim.schedule(src, make(CommandCode::Put, src, dst, len, 0, dst_addr), 0);
  const bool drained = settle(r, sim, p, label).drained;
  PutRun out;
  const auto& ps = sim.ledger().packets();
  if (ps.empty()) {
    // Out of cycle budget before the first packet; the report carries the drain warning.
    if (!drained) return out;
    throw std::runtime_error(label + ": no packet was sent");
  }
  out.first = ps.front();
  out.last = ps.back();
  out.packets = ps.size();
  out.issue = out.first.issue;
  out.intact = same_data(sim, src, 0, dst, dst_addr, len);
  return out;
}

Cycle span(Cycle from, Cycle to) { return from == kNever || to == kNever || to < from ? 0 : to - from; }

std::vector<std::string> breakdown_columns() {
  return {"words", "packets", "hops", "L1", "L2", "L3", "L4", "total", "total_ns", "data_ok"};
}

std::vector<std::string> breakdown_row(const SimConfig& cfg, std::uint32_t len, const PutRun& run) {
  const auto& f = run.first;
  const Cycle total = span(f.issue, f.first_write);
  return {std::to_string(len),
          std::to_string(run.packets),
          std::to_string(f.hops),
          std::to_string(span(f.issue, f.read_start)),
          std::to_string(span(f.read_start, f.head_on_link)),
          std::to_string(span(f.head_on_link, f.payload_at_dest)),
          std::to_string(span(f.payload_at_dest, f.first_write)),
          std::to_string(total),
          fmt(cfg.timing.ns(static_cast<double>(total)), 1),
          run.intact ? "1" : "0"};
}

// Tile 0 and a tile on the same chip, or a derived MT2D chip when the config has none.
SimConfig onchip_config(const SimConfig& cfg, Report& r) {
  if (cfg.topology.tiles_per_chip > 1) return cfg;
  SimConfig c = cfg;
  c.topology.tiles_per_chip = 8;
  c.topology.scheme = OnChipScheme::MT2D;
  c.topology.mesh_width = 4;
  c.topology.N = std::max(c.topology.N, 3);
  for (auto& s : c.topology.lattice) s = std::min(s, 32);
  auto v = c.violations();
  if (!v.empty()) throw UsageError("cannot derive an on-chip configuration: " + v.front());
  r.warnings.push_back("config has one tile per chip; measured on an 8-tile MT2D chip with the same timing");
  return c;
}

// ------------------------------------------------------------ experiments

Report loopback_latency(const SimConfig& cfg, const ExperimentParams& p) {
  auto r = start("loopback_latency", cfg);
  const auto sizes = sizes_or(p, {1, 16, 256, 4096});
  auto& t = r.table("latency", {"words", "L1", "L2", "total", "total_ns", "last_write", "data_ok"});
  for (auto len : sizes) {
    require_memory(cfg, len);
    Simulator sim(cfg);
    const DnpId a = sim.id_at(0);
    fill_source(sim, a, 0, len);
    const std::uint32_t dst = cfg.rdma.memory_words / 2;
    sim.schedule(a, make(CommandCode::Loopback, a, a, len, 0, dst), 0);
    settle(r, sim, p, "loopback " + std::to_string(len));
    const auto& c = sim.engine(a).copies().at(0);
    const Cycle total = span(c.issue, c.first_write);
    const bool ok = same_data(sim, a, 0, a, dst, len);
    t.add({std::to_string(len), std::to_string(span(c.issue, c.read_start)),
           std::to_string(span(c.read_start, c.first_write)), std::to_string(total),
           fmt(cfg.timing.ns(static_cast<double>(total)), 1), std::to_string(span(c.issue, c.last_write)),
           ok ? "1" : "0"});
    r.expect_true("data_" + std::to_string(len), ok);
    if (len == 1) r.expect("latency_1word", static_cast<double>(total), 90, 110);
  }
  return r;
}

Report put_single_hop_onchip(const SimConfig& cfg0, const ExperimentParams& p) {
  auto r = start("put_single_hop_onchip", cfg0);
  const auto cfg = onchip_config(cfg0, r);
  if (cfg.topology.tiles_per_chip != cfg0.topology.tiles_per_chip) r.config = config_entries(cfg);
  const Topology topo(cfg.topology);
  Coord c = topo.coord(topo.ids()[0]);
  c[3] = 1;
  const DnpId dst = topo.layout().encode(c);
  auto& t = r.table("latency", breakdown_columns());
  for (auto len : sizes_or(p, {1, 16, 256})) {
    const auto run = one_put(r, cfg, 0, dst, len, p, "onchip " + std::to_string(len));
    t.add(breakdown_row(cfg, len, run));
    r.expect_true("data_" + std::to_string(len), run.intact);
    if (len == 1) r.expect("latency_1word", static_cast<double>(span(run.issue, run.first.first_write)), 117, 143);
  }
  return r;
}

Report put_single_hop_offchip(const SimConfig& cfg, const ExperimentParams& p) {
  auto r = start("put_single_hop_offchip", cfg);
  const Topology topo(cfg.topology);
  const DnpId dst = tile_at_hops(topo, 1);
  auto& t = r.table("latency", breakdown_columns());
  for (auto len : sizes_or(p, {1, 16, 256})) {
    const auto run = one_put(r, cfg, 0, dst, len, p, "offchip " + std::to_string(len));
    t.add(breakdown_row(cfg, len, run));
    r.expect_true("data_" + std::to_string(len), run.intact);
    if (len == 1) r.expect("latency_1word", static_cast<double>(span(run.issue, run.first.first_write)), 225, 275);
  }
  return r;
}

Report put_double_hop(const SimConfig& cfg, const ExperimentParams& p) {
  auto r = start("put_double_hop", cfg);
  const Topology topo(cfg.topology);
  const DnpId one = tile_at_hops(topo, 1);
  const DnpId two = tile_at_hops(topo, 2);
  auto& t =
      r.table("latency", {"words", "single_hop", "double_hop", "extra_hop", "L2_plus_L3", "extra_hop_ns", "data_ok"});
  const double naive = cfg.timing.switch_inject + cfg.timing.serdes_transit;
  for (auto len : sizes_or(p, {1, 16, 256})) {
    const auto a = one_put(r, cfg, 0, one, len, p, "single " + std::to_string(len));
    const auto b = one_put(r, cfg, 0, two, len, p, "double " + std::to_string(len));
    const auto la = span(a.issue, a.first.first_write), lb = span(b.issue, b.first.first_write);
    const double extra = static_cast<double>(lb) - static_cast<double>(la);
    t.add({std::to_string(len), std::to_string(la), std::to_string(lb), fmt(extra, 0), fmt(naive, 0),
           fmt(cfg.timing.ns(extra), 1), a.intact && b.intact ? "1" : "0"});
    r.expect_true("data_" + std::to_string(len), a.intact && b.intact);
    if (len == 1) {
      r.expect("extra_hop_1word", extra, 90, 110);
      r.expect("extra_hop_below_L2_plus_L3", extra, 0, naive - 1);
    }
  }
  return r;
}

Report get_three_actor(const SimConfig& cfg, const ExperimentParams& p) {
  auto r = start("get_three_actor", cfg);
  const Topology topo(cfg.topology);
  const DnpId A = topo.ids()[0];
  const DnpId B = tile_at_hops(topo, 1);
  DnpId C = B;
  for (int h = 2; h >= 1 && C == B; --h) {
    for (auto id : topo.ids()) {
      if (id != A && id != B && lattice_hops(topo, A, id) == h) {
        C = id;
        break;
      }
    }
  }
  if (C == B) throw UsageError("get_three_actor needs three distinct tiles");
  auto& t = r.table("latency", {"words", "A", "B", "C", "get_to_first_write", "get_to_cmd_done", "put_b_to_c",
                                "data_ok", "equals_put"});
  for (auto len : sizes_or(p, {1, 256})) {
    require_memory(cfg, len);
    const std::uint32_t dst = cfg.rdma.memory_words / 2;
    Simulator get(cfg);
    open_memory(get);
    fill_source(get, B, 0, len);
    get.schedule(A, make(CommandCode::Get, B, C, len, 0, dst), 0);
    settle(r, get, p, "get " + std::to_string(len));
    Cycle first_write = kNever;
    for (const auto& rec : get.ledger().packets()) {
      if (rec.kind != PacketKind::GetRequest && rec.dst == C) first_write = std::min(first_write, rec.first_write);
    }
    Cycle done = kNever;
    for (const auto& e : get.ledger().events()) {
      if (e.tile == A && e.event.kind == EventKind::CmdDone) done = e.event.cycle;
    }
    // the same transfer as a PUT issued by B
    Simulator put(cfg);
    open_memory(put);
    fill_source(put, B, 0, len);
    put.schedule(B, make(CommandCode::Put, B, C, len, 0, dst), 0);
    settle(r, put, p, "put " + std::to_string(len));
    const auto& pf = put.ledger().packets().front();
    const bool ok = same_data(get, B, 0, C, dst, len);
    const bool equal = get.memory(C) == put.memory(C);
    t.add({std::to_string(len), hex_id(A), hex_id(B), hex_id(C), cyc(span(0, first_write)), cyc(done),
           std::to_string(span(pf.issue, pf.first_write)), ok ? "1" : "0", equal ? "1" : "0"});
    r.expect_true("data_" + std::to_string(len), ok);
    r.expect_true("equals_put_" + std::to_string(len), equal);
  }
  return r;
}

Report intra_bw(const SimConfig& cfg, const ExperimentParams& p) {
  auto r = start("intra_bw", cfg);
  auto& t = r.table("bandwidth", {"words", "ports", "cycles", "bits_per_cycle", "bound_cycles", "data_ok"});
  for (auto len : sizes_or(p, {4096})) {
    require_memory(cfg, len);
    Simulator sim(cfg);
    const DnpId a = sim.id_at(0);
    fill_source(sim, a, 0, len);
    const std::uint32_t dst = cfg.rdma.memory_words / 2;
    // One LOOPBACK is a read stream and a write stream running side by side.
    sim.schedule(a, make(CommandCode::Loopback, a, a, len, 0, dst), 0);
    settle(r, sim, p, "intra " + std::to_string(len));
    const auto& c = sim.engine(a).copies().at(0);
    const Cycle cycles = span(c.read_start, c.last_write) + 1;
    const double bits = 2.0 * 32.0 * len / static_cast<double>(cycles);
    const bool ok = same_data(sim, a, 0, a, dst, len);
    t.add({std::to_string(len), std::to_string(cfg.topology.L), std::to_string(cycles), fmt(bits, 3),
           fmt(1.05 * len, 0), ok ? "1" : "0"});
    r.expect_true("data_" + std::to_string(len), ok);
    if (len == 4096) r.expect("cycles_4096", static_cast<double>(cycles), 0, 1.05 * 4096);
  }
  return r;
}

Report offchip_bw_sweep(const SimConfig& cfg, const ExperimentParams& p) {
  auto r = start("offchip_bw_sweep", cfg);
  const Topology topo(cfg.topology);
  const DnpId dst = tile_at_hops(topo, 1);
  auto& t = r.table("bandwidth", {"words", "packets", "window", "bits_per_cycle", "line_bits_per_cycle", "data_ok"});
  for (auto len : sizes_or(p, {1, 4, 16, 64, 256, 1024, 4096})) {
    const auto run = one_put(r, cfg, 0, dst, len, p, "bw " + std::to_string(len));
    const Cycle window = span(run.first.head_on_link, run.last.tail_done);
    const double bits = window ? 32.0 * len / static_cast<double>(window) : 0.0;
    t.add({std::to_string(len), std::to_string(run.packets), std::to_string(window), fmt(bits, 3),
           fmt(cfg.link.bits_per_cycle(), 3), run.intact ? "1" : "0"});
    r.expect_true("data_" + std::to_string(len), run.intact);
    if (len == 4096) r.expect("bits_per_cycle_4096", bits, 3.6, 4.0);
  }
  return r;
}

struct TrafficOutcome {
  std::uint64_t packets = 0;
  std::uint64_t flits_sent = 0;
  std::uint64_t flits_delivered = 0;
  Cycle cycles = 0;
  double mean_latency = 0;
  Cycle max_latency = 0;
  std::size_t error_events = 0;
};

TrafficOutcome replay(Report& r, Simulator& sim, const std::vector<TraceEntry>& trace, std::uint32_t src_words,
                      const ExperimentParams& p, const std::string& label) {
  open_memory(sim);
  for (std::size_t i = 0; i < sim.tile_count(); ++i) fill_source(sim, sim.id_at(i), 0, src_words);
  for (const auto& e : trace) sim.schedule(e);
  const auto d = settle(r, sim, p, label);
  TrafficOutcome o;
  o.cycles = d.cycles;
  double sum = 0;
  for (const auto& rec : sim.ledger().packets()) {
    ++o.packets;
    const Cycle lat = span(rec.head_injected, rec.tail_done);
    sum += static_cast<double>(lat);
    o.max_latency = std::max(o.max_latency, lat);
  }
  o.mean_latency = o.packets ? sum / static_cast<double>(o.packets) : 0.0;
  o.flits_sent = sim.ledger().flits_sent();
  o.flits_delivered = sim.ledger().flits_delivered();
  for (const auto& e : sim.ledger().events()) {
    if (e.event.status != 0) ++o.error_events;
  }
  return o;
}

TrafficSpec traffic_spec(const SimConfig& cfg, const ExperimentParams& p) {
  TrafficSpec s;
  s.pattern = parse_pattern(p.pattern);
  s.rate = p.rate;
  s.packets = p.packets;
  s.min_words = p.min_words;
  s.max_words = p.max_words;
  s.seed = cfg.seed;
  return s;
}

std::vector<std::string> traffic_columns() {
  return {"tiles", "commands", "packets", "flits_sent", "flits_delivered", "lost_flits", "cycles",
          "mean_latency", "max_latency", "accepted_flits_per_cycle_per_tile", "error_events"};
}

std::vector<std::string> traffic_row(const Simulator& sim, std::size_t commands, const TrafficOutcome& o) {
  const double accepted = o.cycles ? static_cast<double>(o.flits_delivered) / static_cast<double>(o.cycles) /
                                         static_cast<double>(sim.tile_count())
                                   : 0.0;
  return {std::to_string(sim.tile_count()), std::to_string(commands), std::to_string(o.packets),
          std::to_string(o.flits_sent), std::to_string(o.flits_delivered),
          std::to_string(o.flits_sent - std::min(o.flits_sent, o.flits_delivered)), std::to_string(o.cycles),
          fmt(o.mean_latency, 1), std::to_string(o.max_latency), fmt(accepted, 4), std::to_string(o.error_events)};
}

Report random_traffic_drain(const SimConfig& cfg, const ExperimentParams& p) {
  auto r = start("random_traffic_drain", cfg);
  Traffic traffic;
  try {
    traffic = generate_traffic(traffic_spec(cfg, p), cfg);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  r.warnings.insert(r.warnings.end(), traffic.warnings.begin(), traffic.warnings.end());
  Simulator sim(cfg);
  const auto o = replay(r, sim, traffic.trace, p.max_words, p, p.pattern);
  auto& t = r.table("traffic", traffic_columns());
  t.add(traffic_row(sim, traffic.trace.size(), o));
  r.expect("lost_flits", static_cast<double>(o.flits_sent - std::min(o.flits_sent, o.flits_delivered)), 0, 0);
  r.expect("error_events", static_cast<double>(o.error_events), 0, 0);
  return r;
}

Report fault_injection_sweep(const SimConfig& cfg, const ExperimentParams& p) {
  auto r = start("fault_injection_sweep", cfg);
  const auto bers = p.bers.empty() ? std::vector<double>{0.0, 1e-6, 1e-5, 1e-4} : p.bers;
  auto spec = traffic_spec(cfg, p);
  if (p.sizes.size() == 2) {
    spec.min_words = p.sizes[0];
    spec.max_words = p.sizes[1];
  } else if (!p.sizes.empty()) {
    throw UsageError("fault_injection_sweep takes sizes as a min,max pair");
  }
  auto& t = r.table("faults", {"ber", "wire_bits", "injected_errors", "injected_frames", "detected_envelope",
                               "retransmissions", "flagged_payloads", "undetected", "packets_hit",
                               "packets_hit_flagged", "corrupt_envelopes_delivered", "link_faults"});
  for (double ber : bers) {
    if (ber < 0 || ber > 0.5) throw UsageError("BER must be in [0, 0.5]");
    auto c = cfg;
    c.link.offchip_ber = ber;
    Traffic traffic;
    try {
      traffic = generate_traffic(spec, c);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    Simulator sim(c);
    const std::string label = "ber " + fmt(ber, 9);
    replay(r, sim, traffic.trace, spec.max_words, p, label);
    std::uint64_t bits = 0, errors = 0, frames = 0, detected = 0, retx = 0, flagged = 0, undetected = 0, faults = 0;
    for (const auto& l : sim.offchip_links()) {
      const auto& s = l->stats();
      bits += 32 * s.words;
      errors += s.injected_errors;
      frames += s.injected_frames;
      detected += s.detected_envelope;
      retx += s.retransmissions;
      flagged += s.flagged_payloads;
      undetected += s.undetected;
      faults += l->fault_raised() ? 1 : 0;
    }
    std::uint64_t hit = 0, hit_flagged = 0, bad_envelopes = 0;
    for (const auto& rec : sim.ledger().packets()) {
      if (rec.delivered && !rec.envelope_intact) ++bad_envelopes;
      if (rec.payload_errors_injected > 0) {
        ++hit;
        if (rec.event_status & status::kCorrupted) ++hit_flagged;
      }
    }
    t.add({fmt(ber, 9), std::to_string(bits), std::to_string(errors), std::to_string(frames), std::to_string(detected),
           std::to_string(retx), std::to_string(flagged), std::to_string(undetected), std::to_string(hit),
           std::to_string(hit_flagged), std::to_string(bad_envelopes), std::to_string(faults)});
    const std::string at = "@" + fmt(ber, 9);
    r.expect("corrupt_envelopes" + at, static_cast<double>(bad_envelopes), 0, 0);
    r.expect("unflagged_payload_hits" + at, static_cast<double>(hit - hit_flagged), 0, 0);
    r.expect("unbalanced_frames" + at,
             static_cast<double>(frames) - static_cast<double>(detected + flagged + undetected), 0, 0);
  }
  return r;
}

using Runner = std::function<Report(const SimConfig&, const ExperimentParams&)>;

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"loopback_latency", loopback_latency},
      {"put_single_hop_onchip", put_single_hop_onchip},
      {"put_single_hop_offchip", put_single_hop_offchip},
      {"put_double_hop", put_double_hop},
      {"get_three_actor", get_three_actor},
      {"intra_bw", intra_bw},
      {"offchip_bw_sweep", offchip_bw_sweep},
      {"random_traffic_drain", random_traffic_drain},
      {"fault_injection_sweep", fault_injection_sweep},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, _] : registry()) n.push_back(k);
    return n;
  }();
  return names;
}

Report run_experiment(const std::string& name, const SimConfig& cfg, const ExperimentParams& p) {
  cfg.validate();
  for (const auto& [k, run] : registry()) {
    if (k == name) return run(cfg, p);
  }
  throw UsageError("unknown experiment '" + name + "'");
}

Report run_trace(const std::vector<TraceEntry>& trace, const SimConfig& cfg, const ExperimentParams& p) {
  cfg.validate();
  auto r = start("trace", cfg);
  Simulator sim(cfg);
  for (const auto& e : trace) {
    try {
      sim.topology().index_of(e.tile);
    } catch (const RangeError&) {
      throw UsageError("trace names tile " + hex_id(e.tile) + ", which is not in the topology");
    }
  }
  // Source data comes from the memory the host left there: zeros and whatever the trace copies.
  const auto o = replay(r, sim, trace, 0, p, "trace");
  auto& t = r.table("traffic", traffic_columns());
  t.add(traffic_row(sim, trace.size(), o));
  auto& ev = r.table("events", {"tile", "kind", "tag", "status", "addr", "len", "peer", "cycle"});
  for (const auto& e : sim.ledger().events()) {
    ev.add({hex_id(e.tile), to_string(e.event.kind), std::to_string(e.event.tag), std::to_string(e.event.status),
            std::to_string(e.event.addr), std::to_string(e.event.len), hex_id(e.event.peer),
            std::to_string(e.event.cycle)});
  }
  r.expect("lost_flits", static_cast<double>(o.flits_sent - std::min(o.flits_sent, o.flits_delivered)), 0, 0);
  return r;
}

}  // namespace dnp::bench
