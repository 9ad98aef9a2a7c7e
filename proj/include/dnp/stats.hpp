#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dnp/address.hpp"
#include "dnp/packet.hpp"
#include "dnp/rdma.hpp"
#include "dnp/types.hpp"

namespace dnp {

inline constexpr Cycle kNever = ~Cycle{0};

// Everything observed about one packet during a run. Cycles are kNever when
// the stage did not happen.
struct PacketRecord {
  std::uint32_t uid = 0;
  DnpId src;
  DnpId dst;
  PacketKind kind = PacketKind::PutData;
  std::uint32_t msg_id = 0;
  std::uint32_t seq = 0;
  std::uint32_t payload_len = 0;
  std::vector<Word> header;  // header words as sent, for envelope checks

  Cycle issue = kNever;             // command entered the CMD FIFO
  Cycle read_start = kNever;        // first intra-tile read of the command
  Cycle head_injected = kNever;     // head flit entered the source switch
  Cycle head_on_link = kNever;      // head flit entered the first inter-tile link
  Cycle head_at_dest = kNever;      // head flit reached the destination DNP interface
  Cycle payload_at_dest = kNever;   // first payload flit reached the destination DNP interface
  Cycle first_write = kNever;       // first payload word written at destination memory
  Cycle tail_done = kNever;         // footer processed at destination
  int hops = 0;                     // inter-tile links traversed
  std::vector<DnpId> path;          // switches visited, source first

  std::uint32_t flits_sent = 0;
  std::uint32_t flits_delivered = 0;
  std::uint32_t words_written = 0;
  std::uint32_t words_discarded = 0;
  std::uint32_t payload_errors_injected = 0;
  bool corrupted_flag = false;   // corruption visible at the destination
  bool envelope_intact = true;   // destination header words equal the sent ones
  bool delivered = false;
  std::uint32_t event_status = 0;  // status of the event that covered this packet

  bool operator==(const PacketRecord&) const = default;
};

struct LoggedEvent {
  DnpId tile;
  CompletionEvent event;
  bool operator==(const LoggedEvent&) const = default;
};

// Append-only during a run.
class StatsLedger {
 public:
  std::uint32_t new_packet(PacketRecord r);
  PacketRecord& packet(std::uint32_t uid) { return packets_.at(uid - 1); }
  const PacketRecord& packet(std::uint32_t uid) const { return packets_.at(uid - 1); }
  const std::vector<PacketRecord>& packets() const { return packets_; }

  void log_event(DnpId tile, const CompletionEvent& e) { events_.push_back({tile, e}); }
  const std::vector<LoggedEvent>& events() const { return events_; }

  // Words carried by data packets, and their fate at the destination.
  std::uint64_t payload_words_injected() const;
  std::uint64_t payload_words_written() const;
  std::uint64_t payload_words_discarded() const;
  std::uint64_t flits_sent() const;
  std::uint64_t flits_delivered() const;
  bool conserved() const;

  bool operator==(const StatsLedger&) const = default;

 private:
  std::vector<PacketRecord> packets_;
  std::vector<LoggedEvent> events_;
};

}  // namespace dnp
