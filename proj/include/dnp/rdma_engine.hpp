#pragma once

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "dnp/address.hpp"
#include "dnp/config.hpp"
#include "dnp/crc16.hpp"
#include "dnp/memory.hpp"
#include "dnp/packet.hpp"
#include "dnp/rdma.hpp"
#include "dnp/stats.hpp"

namespace dnp {

// The switch side of the engine's transmit path (an intra-tile input port).
class InjectionPort {
 public:
  virtual ~InjectionPort() = default;
  virtual bool can_inject() const = 0;
  virtual void inject(const Flit& f, Cycle now) = 0;
};

// Cycle offsets the engine applies internally. Derived from TimingConfig by
// the simulator so that measured stage latencies match the configured ones.
struct EngineTiming {
  int issue_to_read = 70;
  int packetize = 10;    // read start -> head flit offered to the switch
  int rx_write_delay = 29;  // flit handed over by the switch -> memory write
  int loopback_turnaround = 30;
};

enum class PushResult { Accepted, Backpressure };

struct CopyRecord {
  std::uint32_t tag = 0;
  std::uint32_t length = 0;
  Cycle issue = kNever;
  Cycle read_start = kNever;
  Cycle first_write = kNever;
  Cycle last_write = kNever;
};

class RdmaEngine {
 public:
  struct Params {
    DnpId id;
    int master_ports = 2;
    EngineTiming timing;
    RdmaConfig rdma;
    const AddressLayout* layout = nullptr;  // validates remote ids; may be null
  };

  RdmaEngine(Params p, TileMemory& mem, StatsLedger* ledger = nullptr);

  void attach(InjectionPort* inject) { inject_ = inject; }
  DnpId id() const { return p_.id; }

  // Software interface (intra-tile slave).
  PushResult push_command(const CommandWords& w, Cycle now);
  PushResult push_command(const RdmaCommand& c, Cycle now) { return push_command(c.encode(), now); }
  std::optional<CompletionEvent> pop_completion() { return cq_.pop(); }
  Lut& lut() { return lut_; }
  const Lut& lut() const { return lut_; }
  const CompletionQueue& cq() const { return cq_; }
  const CommandQueue& cmd_fifo() const { return fifo_; }

  // Receive side, fed by the switch through one of the L ejection ports.
  bool rx_can_accept(int channel) const;
  void rx_accept(int channel, const Flit& f, Cycle now);

  // Functional receive path: processes a whole packet at once, ignoring
  // timing. Returns false (and changes nothing) when the CQ is full.
  bool handle_incoming_packet(const Packet& p, Cycle now);

  // Commit phase of a cycle.
  void tick(Cycle now);
  bool idle() const;
  std::size_t pending_get_responses() const { return get_jobs_.size(); }
  const std::vector<CopyRecord>& copies() const { return copies_; }
  const MasterPorts& ports() const { return ports_; }
  std::uint64_t commands_accepted() const { return accepted_; }

 private:
  struct PacketPlan {
    PacketKind kind;
    DnpId dest;
    std::uint32_t target_addr;
    std::uint32_t seq;
    std::uint32_t len;
    std::uint32_t msg_id;
    DnpId aux_dnp;
    std::uint32_t aux_addr;
    std::uint32_t length_total;
  };

  struct Job {
    enum class Type { Command, GetResponse } type = Type::Command;
    CommandWords words{};
    Cycle arrival = 0;
    // GetResponse fields
    std::uint32_t src_addr = 0;
    DnpId dst_dnp;
    std::uint32_t dst_addr = 0;
    std::uint32_t length = 0;
    DnpId initiator;
    std::uint32_t req_msg_id = 0;
  };

  enum class Phase { Idle, Waiting, Loopback, Stream, Finish };

  struct Active {
    Job job;
    RdmaCommand cmd;
    Phase phase = Phase::Idle;
    Cycle start = 0;
    // stream
    std::vector<PacketPlan> plan;
    std::size_t pkt = 0;
    std::size_t flit = 0;
    std::vector<Word> header;
    std::uint32_t uid = 0;
    Crc16 crc;
    std::uint32_t src_addr = 0;
    std::uint32_t to_read = 0;
    std::uint32_t read = 0;
    std::deque<Word> staging;
    Cycle next_push = 0;
    // loopback
    std::deque<std::pair<Cycle, Word>> inflight;
    std::uint32_t written = 0;
    std::size_t copy_index = 0;
    // completion posted once the job's data movement is over
    std::optional<CompletionEvent> final_event;
  };

  struct MsgState {
    PacketKind kind = PacketKind::PutData;
    std::uint32_t expected_seq = 0;
    std::uint32_t base = 0;
    std::uint32_t status = 0;
    std::uint32_t total = 0;
    std::uint32_t written = 0;
    std::uint32_t first_addr = 0;
  };

  // One packet being received.
  struct RxPacket {
    HeaderView h;
    std::uint32_t uid = 0;
    std::uint32_t base = 0;
    bool discard = false;
    std::uint32_t status = 0;
    Crc16 crc;
    std::uint32_t payload_seen = 0;
  };

  struct RxEntry {
    Flit flit;
    Cycle arrival;
  };

  struct RxChannel {
    std::deque<RxEntry> q;
    std::vector<Word> header;
    std::vector<std::uint32_t> header_uids;
    std::optional<RxPacket> cur;
  };

  static std::uint32_t msg_key(DnpId src, std::uint32_t msg_id) { return (src.raw() << 8) | (msg_id & 0xFF); }

  void start_job(Cycle now);
  void begin_active(Cycle now);
  void tick_stream(Cycle now);
  void tick_loopback(Cycle now);
  void tick_rx(RxChannel& ch, int index, Cycle now);
  bool post(CompletionEvent e, Cycle now);
  std::uint32_t next_msg_id() { return msg_counter_++ & kMsgIdMask; }
  std::vector<PacketPlan> plan_data(PacketKind kind, DnpId dest, std::uint32_t dst_addr, std::uint32_t length,
                                    DnpId aux);
  void build_header(const PacketPlan& pp);
  bool valid_remote(DnpId id) const;

  RxPacket begin_packet(const HeaderView& h, std::uint32_t uid);
  // Destination address of payload word `i` of the current packet, or nullopt to discard.
  std::optional<std::uint32_t> payload_target(const RxPacket& rx, std::uint32_t i) const;
  bool end_packet(RxPacket& rx, const Footer& footer, Cycle now);
  void account_word(std::uint32_t uid, bool written, Cycle now);

  Params p_;
  TileMemory& mem_;
  StatsLedger* ledger_;
  InjectionPort* inject_ = nullptr;
  MasterPorts ports_;
  CommandQueue fifo_;
  CompletionQueue cq_;
  Lut lut_;
  std::deque<Job> get_jobs_;
  Active act_;
  std::vector<RxChannel> rx_;
  std::map<std::uint32_t, MsgState> msgs_;
  std::uint32_t msg_counter_ = 0;
  std::uint64_t accepted_ = 0;
  std::vector<CopyRecord> copies_;
  std::size_t rx_capacity_;
};

}  // namespace dnp
