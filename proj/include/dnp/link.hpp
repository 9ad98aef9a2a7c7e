#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dnp/address.hpp"
#include "dnp/crc16.hpp"
#include "dnp/dc_balance.hpp"
#include "dnp/packet.hpp"
#include "dnp/stats.hpp"
#include "dnp/switch.hpp"

namespace dnp {

struct LinkStats {
  std::string id;
  std::uint64_t cycles_busy = 0;
  std::uint64_t words = 0;             // frames put on the line, retransmissions included
  std::uint64_t retransmissions = 0;
  std::uint64_t injected_errors = 0;   // flipped line bits
  std::uint64_t injected_frames = 0;   // frames with at least one flipped bit
  std::uint64_t flagged_payloads = 0;  // payload frames delivered with a corruption mark
  std::uint64_t detected_envelope = 0; // envelope frames rejected by the frame CRC
  std::uint64_t undetected = 0;        // corrupted frames the frame CRC accepted
  int max_disparity = 0;
};
std::string link_stats_csv_header();
std::string to_csv(const LinkStats& s);

// Seeded bit-error source. Errors are placed on a continuous bit stream with
// geometrically distributed gaps, so the count over n bits is Binomial(n, BER).
class FaultInjector {
 public:
  explicit FaultInjector(double ber = 0.0, std::uint64_t seed = 1);

  double ber() const { return ber_; }
  // Flip mask for the next 32 transmitted bits.
  Word next_mask();
  // The next frame of this kind (and word index, if given) gets `bit` flipped.
  void arm(FlitKind kind, int bit, std::optional<std::uint16_t> index = std::nullopt);
  // Extra mask from armed faults for a frame about to be transmitted.
  Word armed_mask(const Flit& f);

 private:
  struct Armed {
    FlitKind kind;
    int bit;
    std::optional<std::uint16_t> index;
  };

  double ber_;
  std::mt19937_64 rng_;
  std::optional<std::geometric_distribution<std::uint64_t>> gap_;
  std::uint64_t pos_ = 0;         // bits consumed so far
  std::uint64_t next_error_ = 0;  // absolute position of the next error
  std::vector<Armed> armed_;
};

struct LinkEnd {
  Switch* sw = nullptr;
  int port = 0;
};

// A unidirectional inter-tile channel between a switch output and a switch input.
class Link : public FlitChannel, public CreditSink {
 public:
  Link(std::string id, LinkEnd from, LinkEnd to, StatsLedger* ledger);
  // Phase A: deliver due flits downstream and due credits upstream.
  virtual void tick(Cycle now) = 0;
  virtual bool idle() const = 0;
  virtual FaultInjector& faults() = 0;
  const LinkStats& stats() const { return stats_; }
  const LinkEnd& from() const { return from_; }
  const LinkEnd& to() const { return to_; }

  void credit(int vc, Cycle now) override { credits_.push_back({now + credit_latency_, vc}); }

 protected:
  void deliver_credits(Cycle now);
  LinkStats stats_;
  LinkEnd from_;
  LinkEnd to_;
  StatsLedger* ledger_;
  Cycle credit_latency_ = 1;
  std::deque<std::pair<Cycle, int>> credits_;
};

// Receive-side CRC check of the on-chip interface: recomputes the payload CRC
// and sets the footer corruption bit on mismatch. The packet goes on its way.
class DniChecker {
 public:
  Flit check(const Flit& f);

 private:
  Crc16 crc_;
};

// On-chip point-to-point link: one word per cycle, fixed latency.
class OnChipLink : public Link {
 public:
  OnChipLink(std::string id, LinkEnd from, LinkEnd to, int latency, double ber, std::uint64_t seed,
             StatsLedger* ledger);
  void send(int vc, const Flit& f, Cycle now) override;
  void tick(Cycle now) override;
  bool idle() const override { return q_.empty() && credits_.empty(); }
  FaultInjector& faults() override { return faults_; }

 private:
  struct InFlight {
    Cycle due;
    int vc;
    Flit flit;
  };
  int latency_;
  FaultInjector faults_;
  DniChecker dni_;
  std::deque<InFlight> q_;
};

// Off-chip SerDes link. Words are serialized at `word_cycles` per word,
// DC-balanced, and carry a sideband frame CRC and sequence number. Envelope
// frames that fail the CRC are NAKed and resent from the retransmission
// buffer; payload frames are delivered once and only flagged. The receiver
// releases frames strictly in sequence order.
class OffChipLink : public Link {
 public:
  struct Params {
    int word_cycles = 8;
    int pipeline = 70;  // serializer output -> receiver, and NAK/credit return
    int retry_limit = 8;
    double ber = 0.0;
    std::uint64_t seed = 1;
  };
  OffChipLink(std::string id, LinkEnd from, LinkEnd to, Params p, StatsLedger* ledger);

  void send(int vc, const Flit& f, Cycle now) override;
  void tick(Cycle now) override;
  bool idle() const override;
  FaultInjector& faults() override { return faults_; }
  std::size_t retransmit_buffer_size() const { return held_.size(); }
  bool fault_raised() const { return fault_; }

  static std::uint16_t frame_crc(Word w, std::uint32_t seq, bool envelope);

 private:
  struct Frame {
    Flit flit;
    int vc = 0;
    std::uint32_t seq = 0;
    bool envelope = false;
    int attempts = 0;
  };
  struct OnWire {
    Cycle arrive;
    Frame frame;
    Word line;  // received line bits (DC-balanced form, after faults)
    bool inverted;
    std::uint16_t crc;  // sideband
    Word mask;
  };
  void transmit(Cycle now);
  void receive(const OnWire& w, Cycle now);
  void release(Cycle now);

  Params p_;
  FaultInjector faults_;
  DcBalancer balancer_;
  std::uint32_t next_seq_ = 0;
  std::deque<Frame> tx_;                 // new frames
  std::deque<std::uint32_t> retx_;      // NAKed sequence numbers, oldest first
  std::map<std::uint32_t, Frame> held_;  // retransmission buffer (envelope frames)
  std::deque<OnWire> wire_;
  std::deque<std::pair<Cycle, std::uint32_t>> naks_;
  Cycle busy_until_ = 0;
  // receiver
  std::uint32_t expect_ = 0;
  std::map<std::uint32_t, std::pair<int, Flit>> reorder_;
  std::vector<bool> flagged_;  // per VC: current packet carries a flagged payload word
  bool fault_ = false;
};

// Abstract on-chip transport joining the tiles of one chip (one on-chip port
// per tile). Packets keep an egress busy from head to tail; each ingress and
// each egress moves at most one flit per cycle after a fixed latency.
class Noc {
 public:
  Noc(std::string id, const AddressLayout& layout, int latency, int ingress_depth, double ber, std::uint64_t seed,
      StatsLedger* ledger);
  ~Noc();

  // Attach tile w: its switch and on-chip port index.
  void attach(int w, Switch* sw, int port);
  void tick(Cycle now);  // phase A
  bool idle() const;
  FaultInjector& faults() { return faults_; }
  const LinkStats& stats() const { return stats_; }

 private:
  class Ingress;
  class Egress;
  struct Entry {
    Flit flit;
    Cycle arrival;
  };
  struct Tile {
    Switch* sw = nullptr;
    int port = 0;
    std::unique_ptr<Ingress> in;
    std::unique_ptr<Egress> out;
    std::deque<Entry> fifo;  // ingress queue
    int target = -1;         // egress of the packet at the fifo head
    int owner = -1;          // ingress owning this egress
    int credits = 0;         // space in the attached switch's input
    DniChecker dni;
  };
  struct InFlight {
    Cycle due;
    int to;
    Flit flit;
  };

  std::string id_;
  AddressLayout layout_;
  int latency_;
  int depth_;
  FaultInjector faults_;
  StatsLedger* ledger_;
  LinkStats stats_;
  std::vector<Tile> tiles_;
  std::deque<InFlight> wire_;
  std::deque<std::pair<Cycle, int>> ingress_credits_;  // (due, tile)
  std::deque<std::pair<Cycle, int>> egress_credits_;
  int rr_ = 0;
};

}  // namespace dnp
