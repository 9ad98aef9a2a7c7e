#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "dnp/types.hpp"

namespace dnp {

// Word-addressed tile memory. Storage is allocated in pages on first write,
// so unwritten words read as zero and large sparse memories stay cheap.
class TileMemory {
 public:
  explicit TileMemory(std::uint32_t size_words = 1u << 20);

  std::uint32_t size() const { return size_; }
  bool in_bounds(std::uint64_t addr, std::uint64_t len) const { return addr + len <= size_; }

  Word read(std::uint32_t addr) const;
  void write(std::uint32_t addr, Word value);

  // Bulk access; throws MemoryFault when [addr, addr + n) leaves the memory.
  void read(std::uint32_t addr, std::span<Word> out) const;
  void write(std::uint32_t addr, std::span<const Word> in);
  std::vector<Word> read_range(std::uint32_t addr, std::uint32_t len) const;

  bool operator==(const TileMemory& o) const;

 private:
  static constexpr std::uint32_t kPageBits = 12;
  static constexpr std::uint32_t kPageWords = 1u << kPageBits;
  using Page = std::vector<Word>;
  void check(std::uint64_t addr, std::uint64_t len) const;

  std::uint32_t size_;
  std::unordered_map<std::uint32_t, Page> pages_;
};

// The L intra-tile master ports of one DNP. Every port moves at most one word
// per cycle; a stream is bound to one port so it never exceeds 1 word/cycle.
class MasterPorts {
 public:
  explicit MasterPorts(int count) : count_(count), used_(static_cast<std::size_t>(count), false) {}

  int count() const { return count_; }
  void new_cycle() { std::fill(used_.begin(), used_.end(), false); }
  // Claim `port` (reduced modulo the port count) for this cycle.
  bool try_use(int port);
  std::uint64_t beats(int port) const { return beats_.empty() ? 0 : beats_[static_cast<std::size_t>(port)]; }

 private:
  int count_;
  std::vector<bool> used_;
  std::vector<std::uint64_t> beats_;
};

// A single DMA stream over one master port: used for raw bandwidth checks.
class DmaStream {
 public:
  enum class Dir { Read, Write };
  DmaStream(Dir dir, int port, std::uint32_t addr, std::uint32_t len, Word fill = 0)
      : dir_(dir), port_(port), addr_(addr), len_(len), fill_(fill) {}

  // Advance one cycle; returns true when a word moved.
  bool tick(TileMemory& mem, MasterPorts& ports);
  bool done() const { return moved_ == len_; }
  std::uint32_t moved() const { return moved_; }
  const std::vector<Word>& data() const { return data_; }

 private:
  Dir dir_;
  int port_;
  std::uint32_t addr_;
  std::uint32_t len_;
  Word fill_;
  std::uint32_t moved_ = 0;
  std::vector<Word> data_;
};

}  // namespace dnp
