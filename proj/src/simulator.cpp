#include "dnp/simulator.hpp"

#include <cstdio>
#include <sstream>

namespace dnp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string hex_id(DnpId id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%05x", id.raw());
  return buf;
}

}  // namespace

Calibration calibrate(const SimConfig& cfg) {
  const auto& t = cfg.timing;
  Calibration c;
  c.word_cycles = cfg.link.word_cycles();
  c.engine.issue_to_read = t.cmd_issue_to_read;
  c.engine.loopback_turnaround = t.loopback_turnaround;
  // read start -> head offered to the switch -> routed -> on the link: L2 in total
  c.engine.packetize = t.switch_inject - t.forward_pipeline - 1;
  c.engine.rx_write_delay = t.deliver_to_write;
  c.sw.route_network = t.forward_pipeline;
  c.sw.route_local = 1;
  // A minimal packet puts 6 words on the line; the first payload word then
  // crosses the pipeline and the receiving switch.
  c.serdes_pipeline = t.serdes_transit - 6 * c.word_cycles - 1;
  return c;
}

Simulator::Simulator(const SimConfig& cfg) : cfg_(cfg), topo_((cfg.validate(), cfg.topology)), cal_(calibrate(cfg)) {
  const auto& spec = cfg_.topology;
  tiles_.resize(topo_.tile_count());
  for (std::size_t i = 0; i < tiles_.size(); ++i) {
    auto& t = tiles_[i];
    t.id = topo_.ids()[i];
    t.mem = std::make_unique<TileMemory>(cfg_.rdma.memory_words);
    RdmaEngine::Params ep;
    ep.id = t.id;
    ep.master_ports = spec.L;
    ep.timing = cal_.engine;
    ep.rdma = cfg_.rdma;
    ep.layout = &topo_.layout();
    t.eng = std::make_unique<RdmaEngine>(ep, *t.mem, &ledger_);
    Router router(spec, topo_.layout(), t.id, cfg_.sw.offchip_vcs);
    t.sw = std::make_unique<Switch>(std::move(router), cfg_.sw, cal_.sw, &ledger_);
    t.sw->connect_engine(t.eng.get());
  }

  std::uint64_t link_index = 0;
  auto next_seed = [&] { return splitmix64(cfg_.seed ^ splitmix64(++link_index)); };

  PortLayout pl{spec.L, spec.N, spec.M};
  for (const auto& w : topo_.offchip_wires()) {
    auto& a = tile(w.from);
    auto& b = tile(w.to);
    OffChipLink::Params p;
    p.word_cycles = cal_.word_cycles;
    p.pipeline = cal_.serdes_pipeline;
    p.retry_limit = cfg_.link.retry_limit;
    p.ber = cfg_.link.offchip_ber;
    p.seed = next_seed();
    const int out_port = pl.offchip(w.dir);
    const int in_port = pl.offchip(opposite(w.dir));
    auto link = std::make_unique<OffChipLink>(hex_id(w.from) + ":" + to_string(w.dir), LinkEnd{a.sw.get(), out_port},
                                              LinkEnd{b.sw.get(), in_port}, p, &ledger_);
    a.sw->connect_output(out_port, link.get(), b.sw->depth(in_port));
    b.sw->connect_upstream(in_port, link.get());
    offchip_.push_back(std::move(link));
  }
  for (const auto& w : topo_.mesh_wires()) {
    auto& a = tile(w.from);
    auto& b = tile(w.to);
    const int out_port = pl.onchip(w.from_slot);
    const int in_port = pl.onchip(w.to_slot);
    auto link = std::make_unique<OnChipLink>(hex_id(w.from) + ":m" + std::to_string(w.from_slot),
                                             LinkEnd{a.sw.get(), out_port}, LinkEnd{b.sw.get(), in_port},
                                             cfg_.timing.onchip_link_latency, cfg_.link.onchip_ber, next_seed(),
                                             &ledger_);
    a.sw->connect_output(out_port, link.get(), b.sw->depth(in_port));
    b.sw->connect_upstream(in_port, link.get());
    mesh_.push_back(std::move(link));
  }
  if (spec.scheme == OnChipScheme::MTNoC && spec.tiles_per_chip > 1) {
    for (std::size_t c = 0; c < topo_.chip_count(); ++c) {
      nocs_.push_back(std::make_unique<Noc>("noc" + std::to_string(c), topo_.layout(), cfg_.timing.noc_latency,
                                            cfg_.sw.onchip_vc_depth, cfg_.link.onchip_ber, next_seed(), &ledger_));
    }
    for (auto& t : tiles_) {
      nocs_[topo_.chip_of(t.id)]->attach(topo_.coord(t.id)[3], t.sw.get(), pl.onchip(0));
    }
  }
}

Simulator::~Simulator() = default;

void Simulator::schedule(DnpId id, const CommandWords& w, Cycle at) { tile(id).host.emplace_back(at, w); }

bool Simulator::write_register(DnpId id, std::uint32_t addr, Word value) {
  auto& regs = switch_of(id).regs();
  if (addr == reg::kDimPriority && !fabric_empty()) {
    regs.raise(reg::kStatusRejectedWrite);
    return false;
  }
  return regs.write(addr, value);
}

void Simulator::step() {
  // Phase A: transport.
  for (auto& l : offchip_) l->tick(now_);
  for (auto& l : mesh_) l->tick(now_);
  for (auto& n : nocs_) n->tick(now_);
  // Phase B: switches.
  for (auto& t : tiles_) t.sw->step(now_);
  // Phase C: hosts and engines.
  for (auto& t : tiles_) {
    while (!t.host.empty() && t.host.front().first <= now_) {
      if (t.eng->push_command(t.host.front().second, now_) != PushResult::Accepted) break;
      t.host.pop_front();
    }
    t.eng->tick(now_);
    if (auto_pop_) {
      while (auto e = t.eng->pop_completion()) ledger_.log_event(t.id, *e);
    }
  }
  ++now_;
}

void Simulator::run_for(Cycle n) {
  for (Cycle i = 0; i < n; ++i) step();
}

bool Simulator::fabric_empty() const {
  for (const auto& t : tiles_) {
    if (!t.sw->empty()) return false;
  }
  for (const auto& l : offchip_) {
    if (!l->idle()) return false;
  }
  for (const auto& l : mesh_) {
    if (!l->idle()) return false;
  }
  for (const auto& n : nocs_) {
    if (!n->idle()) return false;
  }
  return true;
}

bool Simulator::quiescent() const {
  for (const auto& t : tiles_) {
    if (!t.host.empty() || !t.eng->idle()) return false;
  }
  return fabric_empty();
}

std::uint64_t Simulator::progress() const {
  std::uint64_t p = ledger_.events().size();
  for (const auto& t : tiles_) {
    for (int port = 0; port < t.eng->ports().count(); ++port) p += t.eng->ports().beats(port);
    for (int port = 0; port < t.sw->ports().total(); ++port) p += t.sw->counters(port).flits_out;
    p += t.eng->commands_accepted();
  }
  for (const auto& l : offchip_) p += l->stats().words;
  return p;
}

std::string Simulator::inventory() const {
  std::ostringstream os;
  for (const auto& t : tiles_) {
    if (!t.sw->empty()) os << "switch " << hex_id(t.id) << ": " << t.sw->buffered_flits() << " flits\n";
    if (!t.eng->idle()) {
      os << "engine " << hex_id(t.id) << ": busy, " << t.eng->cmd_fifo().size() << " queued, "
         << t.eng->pending_get_responses() << " GET responses\n";
    }
    if (!t.host.empty()) os << "host " << hex_id(t.id) << ": " << t.host.size() << " unissued\n";
  }
  for (const auto& l : offchip_) {
    if (!l->idle()) os << "link " << l->stats().id << ": busy\n";
  }
  return os.str();
}

DrainResult Simulator::run_until_drain(Cycle max_cycles) {
  DrainResult r;
  const Cycle start = now_;
  std::uint64_t last_progress = progress();
  Cycle last_change = now_;
  const Cycle stall_window = std::max<Cycle>(cfg_.sw.timeout_cycles, 1024);
  while (now_ - start < max_cycles) {
    if (quiescent()) {
      r.drained = true;
      break;
    }
    step();
    if ((now_ & 255) == 0) {
      const auto p = progress();
      if (p != last_progress) {
        last_progress = p;
        last_change = now_;
      } else if (now_ - last_change > stall_window) {
        // Scheduled commands in the future are not a stall.
        bool waiting = false;
        for (const auto& t : tiles_) {
          if (!t.host.empty() && t.host.front().first > now_) waiting = true;
        }
        if (!waiting) {
          r.stalled = true;
          break;
        }
      }
    }
  }
  if (!r.drained && quiescent()) r.drained = true;
  r.cycles = now_ - start;
  for (const auto& t : tiles_) {
    r.flits_in_fabric += t.sw->buffered_flits();
    r.pending_commands += t.host.size() + t.eng->cmd_fifo().size();
  }
  if (!r.drained) r.inventory = inventory();
  return r;
}

OffChipLink* Simulator::offchip_link(DnpId from, Dir d) {
  const auto& sw = switch_of(from);
  const int port = sw.ports().offchip(d);
  for (auto& l : offchip_) {
    if (l->from().sw == &sw && l->from().port == port) return l.get();
  }
  return nullptr;
}

OnChipLink* Simulator::mesh_link(DnpId from, int slot) {
  const auto& sw = switch_of(from);
  const int port = sw.ports().onchip(slot);
  for (auto& l : mesh_) {
    if (l->from().sw == &sw && l->from().port == port) return l.get();
  }
  return nullptr;
}

Noc* Simulator::noc_of(DnpId id) {
  if (nocs_.empty()) return nullptr;
  return nocs_[topo_.chip_of(id)].get();
}

std::vector<LinkStats> Simulator::link_stats() const {
  std::vector<LinkStats> out;
  for (const auto& l : offchip_) out.push_back(l->stats());
  for (const auto& l : mesh_) out.push_back(l->stats());
  for (const auto& n : nocs_) out.push_back(n->stats());
  return out;
}

}  // namespace dnp
