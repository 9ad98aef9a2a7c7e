#pragma once

#include <deque>
#include <memory>
#include <vector>

#include "dnp/config.hpp"
#include "dnp/packet.hpp"
#include "dnp/rdma_engine.hpp"
#include "dnp/registers.hpp"
#include "dnp/routing.hpp"
#include "dnp/stats.hpp"

namespace dnp {

// Downstream side of a switch output port (a link, the NoC or an engine).
// The switch only sends after consuming a credit, so send() never refuses.
class FlitChannel {
 public:
  virtual ~FlitChannel() = default;
  virtual void send(int vc, const Flit& f, Cycle now) = 0;
};

// Upstream side of a switch input port: told whenever a flit leaves one of
// the port's VC queues.
class CreditSink {
 public:
  virtual ~CreditSink() = default;
  virtual void credit(int vc, Cycle now) = 0;
};

struct PortCounters {
  std::uint64_t flits_in = 0;
  std::uint64_t flits_out = 0;
  std::uint64_t grants = 0;   // packets granted an output (head flits)
  std::uint64_t stalls = 0;   // cycles an input had a ready flit but no grant
};

class Switch {
 public:
  struct Timing {
    int route_network = 19;  // head arrival -> traversal toward a network port
    int route_local = 1;     // head arrival -> traversal toward the local engine
  };

  Switch(Router router, const SwitchConfig& sw, Timing timing, StatsLedger* ledger = nullptr);

  DnpId id() const { return router_.self(); }
  const PortLayout& ports() const { return router_.ports(); }
  int vcs(int port) const;
  int depth(int port) const;
  RegisterFile& regs() { return regs_; }
  const RegisterFile& regs() const { return regs_; }

  // Wiring.
  void connect_output(int port, FlitChannel* ch, int credits_per_vc);
  void connect_engine(RdmaEngine* eng);
  void connect_upstream(int port, CreditSink* up) { in_[static_cast<std::size_t>(port)].upstream = up; }
  InjectionPort& injection(int port) { return *inject_[static_cast<std::size_t>(port)]; }

  // Called by upstream channels.
  int free_slots(int port, int vc) const;
  void accept(int port, int vc, const Flit& f, Cycle now);
  void return_credit(int port, int vc) { ++out_[static_cast<std::size_t>(port)].credits[static_cast<std::size_t>(vc)]; }

  // Route, allocate and move at most one flit per input and per output.
  void step(Cycle now);

  bool empty() const;
  std::size_t buffered_flits() const;
  const PortCounters& counters(int port) const { return counters_[static_cast<std::size_t>(port)]; }
  int credits(int port, int vc) const {
    return out_[static_cast<std::size_t>(port)].credits[static_cast<std::size_t>(vc)];
  }

 private:
  struct Entry {
    Flit flit;
    Cycle arrival;
  };
  enum class VcState { Idle, Routed, Active };
  struct InputVc {
    std::deque<Entry> buf;
    VcState state = VcState::Idle;
    int out_port = -1;
    int out_vc = -1;
    Cycle head_ready = 0;
    Cycle blocked_since = kNever;
  };
  struct Input {
    std::vector<InputVc> vcs;
    int depth = 8;
    int rr = 0;
    CreditSink* upstream = nullptr;
  };
  struct Output {
    int vcs = 1;
    std::vector<int> credits;
    std::vector<int> owner;  // input VC key holding each output VC, or -1
    FlitChannel* channel = nullptr;
    int rr = 0;        // switch allocation pointer over inputs
    int vc_rr = 0;     // VC allocation pointer over input VC keys
  };
  class IntraInput;

  int key(int port, int vc) const { return port * max_vcs_ + vc; }
  bool output_ready(int port, int vc) const;
  void route_heads(Cycle now);
  void allocate_vcs();
  void traverse(int in_port, int vc, Cycle now);
  void record(const Flit& f, int out_port, Cycle now);

  Router router_;
  SwitchConfig sw_;
  Timing timing_;
  StatsLedger* ledger_;
  RegisterFile regs_;
  int max_vcs_;
  std::vector<Input> in_;
  std::vector<Output> out_;
  std::vector<PortCounters> counters_;
  std::vector<std::unique_ptr<InjectionPort>> inject_;
  RdmaEngine* engine_ = nullptr;
};

}  // namespace dnp
