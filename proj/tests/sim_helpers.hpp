#pragma once

#include <vector>

#include "dnp/simulator.hpp"

namespace dnp::testing {

inline RdmaCommand command(CommandCode code, DnpId src, DnpId dst, std::uint32_t len, std::uint32_t src_addr = 0,
                           std::uint32_t dst_addr = 0x1000, std::uint32_t tag = 1) {
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

// Events logged at `tile` of the given kind, in order.
inline std::vector<CompletionEvent> events_at(const Simulator& sim, DnpId tile, EventKind kind) {
  std::vector<CompletionEvent> out;
  for (const auto& e : sim.ledger().events()) {
    if (e.tile == tile && e.event.kind == kind) out.push_back(e.event);
  }
  return out;
}

// Deterministic fill pattern that differs per tile and address.
inline Word pattern(std::size_t tile, std::uint32_t addr) {
  return static_cast<Word>((tile + 1) * 0x9E3779B1u ^ (addr * 0x85EBCA6Bu + 0x1234567u));
}

inline void fill(Simulator& sim, DnpId tile, std::uint32_t base, std::uint32_t len) {
  const auto t = sim.topology().index_of(tile);
  for (std::uint32_t i = 0; i < len; ++i) sim.memory(tile).write(base + i, pattern(t, base + i));
}

}  // namespace dnp::testing
