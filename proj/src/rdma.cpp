#include "dnp/rdma.hpp"

#include <cstdio>
#include <sstream>

#include "dnp/packet.hpp"

namespace dnp {

const char* to_string(CommandCode c) {
  switch (c) {
    case CommandCode::Loopback: return "LOOPBACK";
    case CommandCode::Put: return "PUT";
    case CommandCode::Send: return "SEND";
    case CommandCode::Get: return "GET";
  }
  return "?";
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::CmdDone: return "CMD_DONE";
    case EventKind::PktReceived: return "PKT_RECEIVED";
    case EventKind::Error: return "ERROR";
  }
  return "?";
}

std::array<Word, 7> RdmaCommand::encode() const {
  return {static_cast<Word>(code) | (notify ? kCmdNotify : 0u), src_addr, src_dnp.raw(), dst_addr,
          dst_dnp.raw(), length, tag};
}

RdmaCommand RdmaCommand::decode(std::span<const Word, 7> w) {
  const Word code = w[0] & kCmdCodeMask;
  if (code > 3) throw MalformedPacket("unknown command code " + std::to_string(code));
  if (w[2] > kDnpIdMask || w[4] > kDnpIdMask) throw MalformedPacket("command DNP id exceeds 18 bits");
  RdmaCommand c;
  c.code = static_cast<CommandCode>(code);
  c.notify = (w[0] & kCmdNotify) != 0;
  c.src_addr = w[1];
  c.src_dnp = DnpId(w[2]);
  c.dst_addr = w[3];
  c.dst_dnp = DnpId(w[4]);
  c.length = w[5];
  c.tag = w[6];
  return c;
}

std::string to_trace_line(const TraceEntry& e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu %05x ", static_cast<unsigned long long>(e.cycle), e.tile.raw());
  return buf + to_hex_line(e.words);
}

TraceEntry parse_trace_line(std::string_view line) {
  std::istringstream is{std::string(line)};
  std::vector<std::string> tok;
  for (std::string t; is >> t;) tok.push_back(t);
  auto hex = [](const std::string& s) {
    std::size_t pos = 0;
    unsigned long v = std::stoul(s, &pos, 16);
    if (pos != s.size() || v > 0xFFFFFFFFul) throw MalformedPacket("bad hex token '" + s + "'");
    return static_cast<Word>(v);
  };
  TraceEntry e;
  std::size_t first = 0;
  try {
    if (tok.size() == 9) {
      std::size_t pos = 0;
      e.cycle = std::stoull(tok[0], &pos, 10);
      if (pos != tok[0].size()) throw MalformedPacket("bad cycle '" + tok[0] + "'");
      e.tile = DnpId(hex(tok[1]));
      first = 2;
    } else if (tok.size() != 7) {
      throw MalformedPacket("trace line needs 7 or 9 tokens, got " + std::to_string(tok.size()));
    }
    for (std::size_t i = 0; i < 7; ++i) e.words[i] = hex(tok[first + i]);
  } catch (const std::invalid_argument&) {
    throw MalformedPacket("unparsable trace line");
  } catch (const std::out_of_range&) {
    throw MalformedPacket("trace value out of range");
  }
  if (tok.size() == 7) e.tile = DnpId(e.words[2] & kDnpIdMask);
  return e;
}

namespace status {
std::string describe(std::uint32_t f) {
  static constexpr std::pair<std::uint32_t, const char*> kNames[] = {
      {kCorrupted, "corrupted"},     {kLutMiss, "lut_miss"},         {kSeqError, "seq_error"},
      {kDecodeError, "decode_error"}, {kMemoryFault, "memory_fault"}, {kRemoteFault, "remote_fault"},
      {kRouteError, "route_error"},   {kBadCommand, "bad_command"},   {kGetServed, "get_served"}};
  std::string s;
  for (auto [bit, name] : kNames) {
    if (f & bit) {
      if (!s.empty()) s += '|';
      s += name;
    }
  }
  return s.empty() ? "ok" : s;
}
}  // namespace status

std::string completion_csv_header() { return "cycle,tile,kind,tag,status,addr,len,peer"; }

std::string to_csv(const CompletionEvent& e, DnpId tile) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%llu,%u,%s,%u,%s,%u,%u,%u", static_cast<unsigned long long>(e.cycle), tile.raw(),
                to_string(e.kind), e.tag, status::describe(e.status).c_str(), e.addr, e.len, e.peer.raw());
  return buf;
}

void Lut::set(std::size_t i, const LutEntry& e) {
  if (i >= entries_.size()) throw RangeError("LUT index " + std::to_string(i) + " out of range");
  if (e.valid && e.length == 0) throw RangeError("valid LUT entry needs length >= 1");
  entries_[i] = e;
}

std::optional<std::size_t> Lut::match(std::uint32_t addr, std::uint32_t len) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].covers(addr, len)) return i;
  }
  return std::nullopt;
}

std::optional<std::uint32_t> Lut::claim_send(std::uint32_t len) {
  for (auto& e : entries_) {
    if (e.valid && e.send_eligible && e.length >= len) {
      e.send_eligible = false;
      return e.start_addr;
    }
  }
  return std::nullopt;
}

bool CompletionQueue::push(const CompletionEvent& e) {
  if (full()) return false;
  ring_[(read_ + count_) % ring_.size()] = e;
  ++count_;
  return true;
}

std::optional<CompletionEvent> CompletionQueue::pop() {
  if (empty()) return std::nullopt;
  auto e = ring_[read_];
  read_ = (read_ + 1) % ring_.size();
  --count_;
  return e;
}

bool CommandQueue::push(const CommandWords& w, Cycle now) {
  if (full()) return false;
  q_.push_back({w, now});
  return true;
}

}  // namespace dnp
