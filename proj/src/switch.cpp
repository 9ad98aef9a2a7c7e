#include "dnp/switch.hpp"

#include <stdexcept>

namespace dnp {

class Switch::IntraInput : public InjectionPort {
 public:
  IntraInput(Switch& sw, int port) : sw_(sw), port_(port) {}
  bool can_inject() const override { return sw_.free_slots(port_, 0) > 0; }
  void inject(const Flit& f, Cycle now) override { sw_.accept(port_, 0, f, now); }

 private:
  Switch& sw_;
  int port_;
};

Switch::Switch(Router router, const SwitchConfig& sw, Timing timing, StatsLedger* ledger)
    : router_(std::move(router)),
      sw_(sw),
      timing_(timing),
      ledger_(ledger),
      regs_(sw, router_.ports().total()),
      max_vcs_(std::max(1, sw.offchip_vcs)) {
  const int n = ports().total();
  in_.resize(static_cast<std::size_t>(n));
  out_.resize(static_cast<std::size_t>(n));
  counters_.resize(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    auto& i = in_[static_cast<std::size_t>(p)];
    i.vcs.resize(static_cast<std::size_t>(vcs(p)));
    i.depth = depth(p);
    auto& o = out_[static_cast<std::size_t>(p)];
    o.vcs = vcs(p);
    o.credits.assign(static_cast<std::size_t>(o.vcs), 0);
    o.owner.assign(static_cast<std::size_t>(o.vcs), -1);
  }
  for (int p = 0; p < ports().L; ++p) inject_.push_back(std::make_unique<IntraInput>(*this, p));
}

int Switch::vcs(int port) const { return ports().cls(port) == PortClass::OffChip ? sw_.offchip_vcs : 1; }

int Switch::depth(int port) const {
  switch (ports().cls(port)) {
    case PortClass::Intra: return sw_.intra_vc_depth;
    case PortClass::OnChip: return sw_.onchip_vc_depth;
    case PortClass::OffChip: return sw_.offchip_vc_depth;
  }
  return 1;
}

void Switch::connect_output(int port, FlitChannel* ch, int credits_per_vc) {
  auto& o = out_[static_cast<std::size_t>(port)];
  o.channel = ch;
  o.credits.assign(static_cast<std::size_t>(o.vcs), credits_per_vc);
}

void Switch::connect_engine(RdmaEngine* eng) {
  engine_ = eng;
  eng->attach(inject_.at(0).get());
}

int Switch::free_slots(int port, int vc) const {
  const auto& i = in_[static_cast<std::size_t>(port)];
  return i.depth - static_cast<int>(i.vcs[static_cast<std::size_t>(vc)].buf.size());
}

void Switch::accept(int port, int vc, const Flit& f, Cycle now) {
  auto& i = in_[static_cast<std::size_t>(port)];
  auto& q = i.vcs[static_cast<std::size_t>(vc)].buf;
  if (static_cast<int>(q.size()) >= i.depth) throw std::logic_error("switch input VC overflow (credit bug)");
  q.push_back({f, now});
  ++counters_[static_cast<std::size_t>(port)].flits_in;
}

bool Switch::output_ready(int port, int vc) const {
  if (!regs_.port_enabled(port)) return false;
  if (port < ports().L) return engine_ != nullptr && engine_->rx_can_accept(port);
  const auto& o = out_[static_cast<std::size_t>(port)];
  return o.channel != nullptr && o.credits[static_cast<std::size_t>(vc)] > 0;
}

void Switch::route_heads(Cycle now) {
  for (int p = 0; p < ports().total(); ++p) {
    auto& in = in_[static_cast<std::size_t>(p)];
    for (int v = 0; v < static_cast<int>(in.vcs.size()); ++v) {
      auto& ivc = in.vcs[static_cast<std::size_t>(v)];
      if (ivc.state != VcState::Idle || ivc.buf.empty()) continue;
      const auto& front = ivc.buf.front();
      RouteDecision r;
      try {
        r = router_.route(header_dest(front.flit.word), p, v, regs_.dim_priority());
      } catch (const RangeError&) {
        // Quarantine: hand it to the local engine, which reports it.
        r = {router_.ejection_port(p), 0, true};
        regs_.raise(reg::kStatusRouteError);
      }
      const Cycle lat = static_cast<Cycle>(r.local ? timing_.route_local : timing_.route_network);
      ivc.state = VcState::Routed;
      ivc.out_port = r.port;
      ivc.out_vc = r.vc;
      ivc.head_ready = std::max(front.arrival + lat, now + lat - 1);
    }
  }
}

void Switch::allocate_vcs() {
  const int keys = ports().total() * max_vcs_;
  const bool fixed = regs_.arbitration() == ArbitrationPolicy::FixedPriority;
  // Each routed input VC requests exactly one output VC; the free output VC
  // grants the requester that comes first in its round-robin order.
  struct Request {
    int key, out, out_vc;
  };
  std::vector<Request> req;
  for (int p = 0; p < ports().total(); ++p) {
    const auto& in = in_[static_cast<std::size_t>(p)];
    for (int v = 0; v < static_cast<int>(in.vcs.size()); ++v) {
      const auto& ivc = in.vcs[static_cast<std::size_t>(v)];
      if (ivc.state == VcState::Routed) req.push_back({p * max_vcs_ + v, ivc.out_port, ivc.out_vc});
    }
  }
  for (std::size_t i = 0; i < req.size(); ++i) {
    auto& out = out_[static_cast<std::size_t>(req[i].out)];
    const auto ov = static_cast<std::size_t>(req[i].out_vc);
    if (out.owner[ov] != -1) continue;
    const int start = fixed ? 0 : out.vc_rr % keys;
    const Request* best = nullptr;
    int best_d = keys;
    for (const auto& r : req) {
      if (r.out != req[i].out || r.out_vc != req[i].out_vc) continue;
      const int d = (r.key - start + keys) % keys;
      if (d < best_d) {
        best_d = d;
        best = &r;
      }
    }
    const int p = best->key / max_vcs_;
    auto& ivc = in_[static_cast<std::size_t>(p)].vcs[static_cast<std::size_t>(best->key % max_vcs_)];
    out.owner[ov] = best->key;
    out.vc_rr = best->key + 1;
    ivc.state = VcState::Active;
    ++counters_[static_cast<std::size_t>(p)].grants;
  }
}

void Switch::record(const Flit& f, int out_port, Cycle now) {
  if (ledger_ == nullptr || f.packet_uid == 0) return;
  auto& r = ledger_->packet(f.packet_uid);
  const bool local = out_port < ports().L;
  if (f.kind == FlitKind::Head && f.index == 0) {
    r.path.push_back(id());
    if (local) {
      r.head_at_dest = now;
    } else {
      ++r.hops;
      if (ports().cls(out_port) == PortClass::OnChip && r.head_on_link == kNever) r.head_on_link = now;
    }
  }
  if (local && f.kind == FlitKind::Body && f.index == kHeaderWords) r.payload_at_dest = now;
}

void Switch::traverse(int in_port, int vc, Cycle now) {
  auto& in = in_[static_cast<std::size_t>(in_port)];
  auto& ivc = in.vcs[static_cast<std::size_t>(vc)];
  const Entry e = ivc.buf.front();
  ivc.buf.pop_front();
  const int op = ivc.out_port;
  const int ov = ivc.out_vc;
  auto& out = out_[static_cast<std::size_t>(op)];
  if (op < ports().L) {
    engine_->rx_accept(op, e.flit, now);
  } else {
    --out.credits[static_cast<std::size_t>(ov)];
    out.channel->send(ov, e.flit, now);
  }
  if (in.upstream != nullptr) in.upstream->credit(vc, now);
  ++counters_[static_cast<std::size_t>(op)].flits_out;
  record(e.flit, op, now);
  if (e.flit.kind == FlitKind::Tail) {
    out.owner[static_cast<std::size_t>(ov)] = -1;
    ivc.state = VcState::Idle;
    ivc.out_port = -1;
    ivc.out_vc = -1;
  }
}

void Switch::step(Cycle now) {
  regs_.commit();
  if (regs_.take_reset()) {
    for (auto& c : counters_) c = PortCounters{};
  }
  route_heads(now);
  allocate_vcs();

  const int n = ports().total();
  std::vector<int> req(static_cast<std::size_t>(n), -1);
  bool any = false;
  for (int p = 0; p < n; ++p) {
    auto& in = in_[static_cast<std::size_t>(p)];
    if (!regs_.port_enabled(p)) continue;
    const int V = static_cast<int>(in.vcs.size());
    for (int k = 0; k < V; ++k) {
      const int v = (in.rr + k) % V;
      const auto& ivc = in.vcs[static_cast<std::size_t>(v)];
      if (ivc.state != VcState::Active || ivc.buf.empty()) continue;
      const auto& f = ivc.buf.front();
      const bool lead = f.flit.kind == FlitKind::Head && f.flit.index == 0;
      if (now < (lead ? ivc.head_ready : f.arrival + 1)) continue;
      if (!output_ready(ivc.out_port, ivc.out_vc)) continue;
      req[static_cast<std::size_t>(p)] = v;
      any = true;
      break;
    }
  }

  std::vector<int> moved(static_cast<std::size_t>(n), -1);  // VC that moved, per input
  if (any) {
    const bool fixed = regs_.arbitration() == ArbitrationPolicy::FixedPriority;
    for (int o = 0; o < n; ++o) {
      auto& out = out_[static_cast<std::size_t>(o)];
      int winner = -1;
      for (int k = 0; k < n; ++k) {
        const int p = fixed ? k : (out.rr + k) % n;
        const int v = req[static_cast<std::size_t>(p)];
        if (v < 0 || in_[static_cast<std::size_t>(p)].vcs[static_cast<std::size_t>(v)].out_port != o) continue;
        winner = p;
        break;
      }
      if (winner < 0) continue;
      const int v = req[static_cast<std::size_t>(winner)];
      traverse(winner, v, now);
      moved[static_cast<std::size_t>(winner)] = v;
      out.rr = (winner + 1) % n;
      auto& in = in_[static_cast<std::size_t>(winner)];
      in.rr = (v + 1) % static_cast<int>(in.vcs.size());
    }
    for (int p = 0; p < n; ++p) {
      if (req[static_cast<std::size_t>(p)] >= 0 && moved[static_cast<std::size_t>(p)] < 0) {
        ++counters_[static_cast<std::size_t>(p)].stalls;
      }
    }
  }

  // Blocked-packet watchdog.
  for (int p = 0; p < n; ++p) {
    auto& vcs = in_[static_cast<std::size_t>(p)].vcs;
    for (int v = 0; v < static_cast<int>(vcs.size()); ++v) {
      auto& ivc = vcs[static_cast<std::size_t>(v)];
      if (ivc.buf.empty() || moved[static_cast<std::size_t>(p)] == v) {
        ivc.blocked_since = kNever;
      } else if (ivc.blocked_since == kNever) {
        ivc.blocked_since = now;
      } else if (now - ivc.blocked_since > regs_.timeout()) {
        regs_.raise(reg::kStatusTimeout);
      }
    }
  }
}

bool Switch::empty() const { return buffered_flits() == 0; }

std::size_t Switch::buffered_flits() const {
  std::size_t n = 0;
  for (const auto& in : in_) {
    for (const auto& v : in.vcs) n += v.buf.size();
  }
  return n;
}

}  // namespace dnp
