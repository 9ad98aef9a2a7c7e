#pragma once

#include <cstdint>
#include <span>

#include "dnp/types.hpp"

namespace dnp {

// CRC-16/ARC: poly 0x8005 (reflected 0xA001), init 0x0000, no final xor.
// Check value over ASCII "123456789" is 0xBB3D.
std::uint16_t crc16(std::span<const std::uint8_t> data);

// Incremental form; feed bytes or big-endian words.
class Crc16 {
 public:
  void update(std::uint8_t byte);
  void update_word(Word w);
  std::uint16_t value() const { return crc_; }
  void reset() { crc_ = 0; }

 private:
  std::uint16_t crc_ = 0;
};

// CRC over a sequence of words, each contributing its four bytes MSB first.
std::uint16_t crc16_words(std::span<const Word> words);

}  // namespace dnp
