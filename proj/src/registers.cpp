#include "dnp/registers.hpp"

#include <algorithm>

namespace dnp {

namespace reg {

Word encode_priority(const std::array<int, 3>& prio) {
  return static_cast<Word>(prio[0]) | static_cast<Word>(prio[1]) << 2 | static_cast<Word>(prio[2]) << 4;
}

std::optional<std::array<int, 3>> decode_priority(Word w) {
  if (w >> 6) return std::nullopt;
  std::array<int, 3> p{static_cast<int>(w & 3), static_cast<int>((w >> 2) & 3), static_cast<int>((w >> 4) & 3)};
  auto s = p;
  std::sort(s.begin(), s.end());
  if (s != std::array<int, 3>{0, 1, 2}) return std::nullopt;
  return p;
}

}  // namespace reg

RegisterFile::RegisterFile(const SwitchConfig& sw, int ports)
    : prio_(sw.dim_priority),
      arb_(sw.arbitration),
      enable_(ports >= 32 ? ~Word{0} : (Word{1} << ports) - 1),
      timeout_(sw.timeout_cycles) {}

bool RegisterFile::write(std::uint32_t addr, Word value) {
  bool ok = false;
  switch (addr) {
    case reg::kDimPriority: ok = reg::decode_priority(value).has_value(); break;
    case reg::kArbPolicy: ok = value <= 1; break;
    case reg::kPortEnable:
    case reg::kTimeout:
    case reg::kSoftReset: ok = true; break;
    default: ok = false;
  }
  if (!ok) {
    status_ |= reg::kStatusRejectedWrite;
    return false;
  }
  staged_.emplace_back(addr, value);
  return true;
}

Word RegisterFile::read(std::uint32_t addr) const {
  switch (addr) {
    case reg::kDimPriority: return reg::encode_priority(prio_);
    case reg::kArbPolicy: return arb_ == ArbitrationPolicy::FixedPriority ? 1 : 0;
    case reg::kPortEnable: return enable_;
    case reg::kTimeout: return timeout_;
    case reg::kSoftReset: return 0;
    case reg::kStatus: return status_;
  }
  return 0;
}

void RegisterFile::commit() {
  for (auto [addr, value] : staged_) {
    switch (addr) {
      case reg::kDimPriority: prio_ = *reg::decode_priority(value); break;
      case reg::kArbPolicy: arb_ = value ? ArbitrationPolicy::FixedPriority : ArbitrationPolicy::RoundRobin; break;
      case reg::kPortEnable: enable_ = value; break;
      case reg::kTimeout: timeout_ = value; break;
      case reg::kSoftReset:
        if (value & 1u) {
          status_ = 0;
          reset_ = true;
        }
        break;
    }
  }
  staged_.clear();
}

}  // namespace dnp
