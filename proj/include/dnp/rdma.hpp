#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnp/address.hpp"
#include "dnp/types.hpp"

namespace dnp {

enum class CommandCode : std::uint8_t { Loopback = 0, Put = 1, Send = 2, Get = 3 };
inline constexpr Word kCmdCodeMask = 0xFF;
inline constexpr Word kCmdNotify = 1u << 8;

const char* to_string(CommandCode c);

// Seven-word descriptor: [code+flags | src_addr | src_dnp | dst_addr | dst_dnp | length | tag].
struct RdmaCommand {
  CommandCode code = CommandCode::Put;
  std::uint32_t src_addr = 0;
  DnpId src_dnp;
  std::uint32_t dst_addr = 0;
  DnpId dst_dnp;
  std::uint32_t length = 1;
  std::uint32_t tag = 0;
  bool notify = true;

  std::array<Word, 7> encode() const;
  // Throws MalformedPacket on an unknown code or out-of-range DNP id.
  static RdmaCommand decode(std::span<const Word, 7> words);
  bool operator==(const RdmaCommand&) const = default;
};

using CommandWords = std::array<Word, 7>;

// Trace line forms: "w0 .. w6" or "cycle tile w0 .. w6" (tile and words in hex).
struct TraceEntry {
  Cycle cycle = 0;
  DnpId tile;
  CommandWords words{};
};
std::string to_trace_line(const TraceEntry& e);
TraceEntry parse_trace_line(std::string_view line);

enum class EventKind : std::uint8_t { CmdDone, PktReceived, Error };
const char* to_string(EventKind k);

namespace status {
inline constexpr std::uint32_t kCorrupted = 1u << 0;
inline constexpr std::uint32_t kLutMiss = 1u << 1;
inline constexpr std::uint32_t kSeqError = 1u << 2;
inline constexpr std::uint32_t kDecodeError = 1u << 3;
inline constexpr std::uint32_t kMemoryFault = 1u << 4;
inline constexpr std::uint32_t kRemoteFault = 1u << 5;
inline constexpr std::uint32_t kRouteError = 1u << 6;
inline constexpr std::uint32_t kBadCommand = 1u << 7;
inline constexpr std::uint32_t kGetServed = 1u << 8;
std::string describe(std::uint32_t flags);
}  // namespace status

struct CompletionEvent {
  EventKind kind = EventKind::CmdDone;
  std::uint32_t tag = 0;  // command tag for CMD_DONE and command errors, msg_id otherwise
  std::uint32_t status = 0;
  std::uint32_t addr = 0;
  std::uint32_t len = 0;
  DnpId peer;
  Cycle cycle = 0;
  bool operator==(const CompletionEvent&) const = default;
};

// CSV: cycle,tile,kind,tag,status,addr,len,peer
std::string completion_csv_header();
std::string to_csv(const CompletionEvent& e, DnpId tile);

struct LutEntry {
  std::uint32_t start_addr = 0;
  std::uint32_t length = 0;
  bool valid = false;
  bool send_eligible = false;

  bool covers(std::uint64_t addr, std::uint64_t len) const {
    return valid && addr >= start_addr && addr + len <= std::uint64_t{start_addr} + length;
  }
  bool operator==(const LutEntry&) const = default;
};

class Lut {
 public:
  explicit Lut(std::size_t entries) : entries_(entries) {}

  std::size_t size() const { return entries_.size(); }
  const LutEntry& at(std::size_t i) const { return entries_.at(i); }
  // Throws RangeError on a bad index or a valid entry of zero length.
  void set(std::size_t i, const LutEntry& e);
  void clear(std::size_t i) { entries_.at(i) = LutEntry{}; }

  // First valid entry (ascending index) containing the whole range.
  std::optional<std::size_t> match(std::uint32_t addr, std::uint32_t len) const;
  // Lowest-index valid SEND-eligible entry of at least `len` words; the
  // entry loses eligibility. Returns the landing address.
  std::optional<std::uint32_t> claim_send(std::uint32_t len);

 private:
  std::vector<LutEntry> entries_;
};

// Ring buffer of events in tile memory; never overwrites unread entries.
class CompletionQueue {
 public:
  explicit CompletionQueue(std::size_t capacity) : ring_(capacity) {}

  bool full() const { return count_ == ring_.size(); }
  bool empty() const { return count_ == 0; }
  std::size_t size() const { return count_; }
  std::size_t capacity() const { return ring_.size(); }
  bool push(const CompletionEvent& e);
  std::optional<CompletionEvent> pop();

 private:
  std::vector<CompletionEvent> ring_;
  std::size_t read_ = 0;
  std::size_t count_ = 0;
};

// Hardware CMD FIFO; holds raw words, decoded only when executed.
class CommandQueue {
 public:
  struct Slot {
    CommandWords words;
    Cycle enqueued;
  };

  explicit CommandQueue(std::size_t depth) : depth_(depth) {}
  bool full() const { return q_.size() >= depth_; }
  bool empty() const { return q_.empty(); }
  std::size_t size() const { return q_.size(); }
  std::size_t depth() const { return depth_; }
  bool push(const CommandWords& w, Cycle now);
  const Slot& front() const { return q_.front(); }
  void pop() { q_.pop_front(); }

 private:
  std::size_t depth_;
  std::deque<Slot> q_;
};

}  // namespace dnp
