#include "dnp/stats.hpp"

namespace dnp {

std::uint32_t StatsLedger::new_packet(PacketRecord r) {
  r.uid = static_cast<std::uint32_t>(packets_.size() + 1);
  packets_.push_back(std::move(r));
  return packets_.back().uid;
}

std::uint64_t StatsLedger::payload_words_injected() const {
  std::uint64_t n = 0;
  for (const auto& p : packets_) n += p.payload_len;
  return n;
}

std::uint64_t StatsLedger::payload_words_written() const {
  std::uint64_t n = 0;
  for (const auto& p : packets_) n += p.words_written;
  return n;
}

std::uint64_t StatsLedger::payload_words_discarded() const {
  std::uint64_t n = 0;
  for (const auto& p : packets_) n += p.words_discarded;
  return n;
}

std::uint64_t StatsLedger::flits_sent() const {
  std::uint64_t n = 0;
  for (const auto& p : packets_) n += p.flits_sent;
  return n;
}

std::uint64_t StatsLedger::flits_delivered() const {
  std::uint64_t n = 0;
  for (const auto& p : packets_) n += p.flits_delivered;
  return n;
}

bool StatsLedger::conserved() const {
  for (const auto& p : packets_) {
    if (!p.delivered) return false;
    if (p.flits_delivered != p.flits_sent) return false;
    if (p.words_written + p.words_discarded != p.payload_len) return false;
  }
  return true;
}

}  // namespace dnp
