#include "dnp/crc16.hpp"

#include <array>

namespace dnp {
namespace {

constexpr std::array<std::uint16_t, 256> make_table() {
  std::array<std::uint16_t, 256> table{};
  for (unsigned i = 0; i < 256; ++i) {
    std::uint16_t c = static_cast<std::uint16_t>(i);
    for (int k = 0; k < 8; ++k) {
      c = (c & 1u) ? static_cast<std::uint16_t>((c >> 1) ^ 0xA001u) : static_cast<std::uint16_t>(c >> 1);
    }
    table[i] = c;
  }
  return table;
}

constexpr auto kTable = make_table();

}  // namespace

void Crc16::update(std::uint8_t byte) {
  crc_ = static_cast<std::uint16_t>((crc_ >> 8) ^ kTable[(crc_ ^ byte) & 0xFFu]);
}

void Crc16::update_word(Word w) {
  update(static_cast<std::uint8_t>(w >> 24));
  update(static_cast<std::uint8_t>(w >> 16));
  update(static_cast<std::uint8_t>(w >> 8));
  update(static_cast<std::uint8_t>(w));
}

std::uint16_t crc16(std::span<const std::uint8_t> data) {
  Crc16 c;
  for (auto b : data) c.update(b);
  return c.value();
}

std::uint16_t crc16_words(std::span<const Word> words) {
  Crc16 c;
  for (auto w : words) c.update_word(w);
  return c.value();
}

}  // namespace dnp
