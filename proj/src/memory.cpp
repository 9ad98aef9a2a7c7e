#include "dnp/memory.hpp"

#include <algorithm>
#include <string>

namespace dnp {

TileMemory::TileMemory(std::uint32_t size_words) : size_(size_words) {}

void TileMemory::check(std::uint64_t addr, std::uint64_t len) const {
  if (!in_bounds(addr, len)) {
    throw MemoryFault("access [" + std::to_string(addr) + ", +" + std::to_string(len) +
                      ") outside tile memory of " + std::to_string(size_) + " words");
  }
}

Word TileMemory::read(std::uint32_t addr) const {
  check(addr, 1);
  auto it = pages_.find(addr >> kPageBits);
  return it == pages_.end() ? 0 : it->second[addr & (kPageWords - 1)];
}

void TileMemory::write(std::uint32_t addr, Word value) {
  check(addr, 1);
  auto it = pages_.find(addr >> kPageBits);
  if (it == pages_.end()) {
    if (value == 0) return;
    it = pages_.emplace(addr >> kPageBits, Page(kPageWords, 0)).first;
  }
  it->second[addr & (kPageWords - 1)] = value;
}

void TileMemory::read(std::uint32_t addr, std::span<Word> out) const {
  check(addr, out.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = read(addr + static_cast<std::uint32_t>(i));
}

void TileMemory::write(std::uint32_t addr, std::span<const Word> in) {
  check(addr, in.size());
  for (std::size_t i = 0; i < in.size(); ++i) write(addr + static_cast<std::uint32_t>(i), in[i]);
}

std::vector<Word> TileMemory::read_range(std::uint32_t addr, std::uint32_t len) const {
  std::vector<Word> out(len);
  read(addr, out);
  return out;
}

bool TileMemory::operator==(const TileMemory& o) const {
  if (size_ != o.size_) return false;
  auto covers = [](const TileMemory& a, const TileMemory& b) {
    for (const auto& [idx, page] : a.pages_) {
      if (page.empty()) continue;
      auto it = b.pages_.find(idx);
      const bool b_empty = it == b.pages_.end() || it->second.empty();
      if (b_empty) {
        if (std::any_of(page.begin(), page.end(), [](Word w) { return w != 0; })) return false;
      } else if (page != it->second) {
        return false;
      }
    }
    return true;
  };
  return covers(*this, o) && covers(o, *this);
}

bool MasterPorts::try_use(int port) {
  if (count_ <= 0) return false;
  const auto p = static_cast<std::size_t>(port % count_);
  if (used_[p]) return false;
  used_[p] = true;
  if (beats_.empty()) beats_.assign(static_cast<std::size_t>(count_), 0);
  ++beats_[p];
  return true;
}

bool DmaStream::tick(TileMemory& mem, MasterPorts& ports) {
  if (done() || !ports.try_use(port_)) return false;
  if (dir_ == Dir::Read) {
    data_.push_back(mem.read(addr_ + moved_));
  } else {
    mem.write(addr_ + moved_, fill_ + moved_);
  }
  ++moved_;
  return true;
}

}  // namespace dnp
