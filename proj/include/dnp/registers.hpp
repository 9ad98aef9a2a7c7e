#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dnp/config.hpp"
#include "dnp/types.hpp"

namespace dnp {

// Intra-tile slave address map of the switch configuration registers.
namespace reg {
inline constexpr std::uint32_t kDimPriority = 0x00;  // 2 bits per slot, slot 0 in bits [1:0] is corrected first
inline constexpr std::uint32_t kArbPolicy = 0x04;    // 0 round robin, 1 fixed priority
inline constexpr std::uint32_t kPortEnable = 0x08;   // bit p enables port p
inline constexpr std::uint32_t kTimeout = 0x0C;      // blocked-packet threshold in cycles
inline constexpr std::uint32_t kSoftReset = 0x10;    // bit 0 clears STATUS and the counters
inline constexpr std::uint32_t kStatus = 0x14;       // sticky flags, read only

inline constexpr Word kStatusTimeout = 1u << 0;
inline constexpr Word kStatusLinkFault = 1u << 1;
inline constexpr Word kStatusRouteError = 1u << 2;
inline constexpr Word kStatusRejectedWrite = 1u << 3;

Word encode_priority(const std::array<int, 3>& prio);
std::optional<std::array<int, 3>> decode_priority(Word w);
}  // namespace reg

// Register writes are staged and become visible at the next cycle boundary.
class RegisterFile {
 public:
  RegisterFile(const SwitchConfig& sw, int ports);

  // False (and STATUS gets kStatusRejectedWrite) for an unknown address,
  // a read-only register or an invalid value.
  bool write(std::uint32_t addr, Word value);
  Word read(std::uint32_t addr) const;
  void commit();
  bool pending() const { return !staged_.empty(); }

  const std::array<int, 3>& dim_priority() const { return prio_; }
  ArbitrationPolicy arbitration() const { return arb_; }
  bool port_enabled(int p) const { return (enable_ >> p) & 1u; }
  std::uint32_t timeout() const { return timeout_; }
  Word status() const { return status_; }
  void raise(Word bits) { status_ |= bits; }
  // Set by commit() when a soft reset was written; cleared by the owner.
  bool take_reset() {
    bool r = reset_;
    reset_ = false;
    return r;
  }

 private:
  std::array<int, 3> prio_;
  ArbitrationPolicy arb_;
  Word enable_;
  std::uint32_t timeout_;
  Word status_ = 0;
  bool reset_ = false;
  std::vector<std::pair<std::uint32_t, Word>> staged_;
};

}  // namespace dnp
