#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dnp/address.hpp"
#include "dnp/types.hpp"

namespace dnp {

inline constexpr std::size_t kMaxPayloadWords = 256;
inline constexpr std::size_t kNetHeaderWords = 2;
inline constexpr std::size_t kRdmaHeaderWords = 3;
inline constexpr std::size_t kHeaderWords = kNetHeaderWords + kRdmaHeaderWords;
inline constexpr std::size_t kEnvelopeWords = kHeaderWords + 1;
inline constexpr std::size_t kMaxPacketWords = kEnvelopeWords + kMaxPayloadWords;
inline constexpr std::uint32_t kMaxMessageWords = (1u << 20) - 1;
inline constexpr std::uint32_t kMsgIdMask = 0xFF;

enum class PacketKind : std::uint8_t { PutData = 0, SendData = 1, GetRequest = 2 };

const char* to_string(PacketKind k);

struct NetHeader {
  DnpId dest;
  DnpId source;
  PacketKind kind = PacketKind::PutData;
  std::uint16_t payload_len = 0;
  std::uint8_t vc_hint = 0;
  bool operator==(const NetHeader&) const = default;
};

// Field meaning depends on the packet kind:
//  data packets   target_addr = landing address of this fragment (0 for SEND),
//                 aux_dnp = originator, seq = fragment index
//  GET_REQUEST    target_addr = destination address at aux_dnp,
//                 aux_addr = source address at the receiving DNP
// length_total is the whole message length in both cases.
struct RdmaHeader {
  std::uint32_t target_addr = 0;
  DnpId aux_dnp;
  std::uint32_t aux_addr = 0;
  std::uint32_t msg_id = 0;
  std::uint32_t seq = 0;
  std::uint32_t length_total = 0;
  bool operator==(const RdmaHeader&) const = default;
};

struct Footer {
  std::uint16_t crc = 0;
  bool corrupted = false;
  bool operator==(const Footer&) const = default;
};

struct Packet {
  NetHeader net;
  RdmaHeader rdma;
  std::vector<Word> payload;
  Footer footer;
  bool operator==(const Packet&) const = default;

  std::size_t word_count() const { return kEnvelopeWords + payload.size(); }
};

// Returns a description of the first violated invariant, or nullopt.
std::optional<std::string> validate(const Packet& p);

// Word layout:
//   w0  dest[17:0] kind[19:18] vc[21:20] payload_len[30:22]
//   w1  source[17:0] msg_id[25:18] length_total[19:14] in [31:26]
//   w2  target_addr
//   w3  aux_addr (GET_REQUEST) or seq (data packets)
//   w4  aux_dnp[17:0] length_total[13:0] in [31:18]
//   ..  payload
//   wN  crc[15:0] corrupted[16]
// encode recomputes the footer CRC over the payload; the corrupted bit is kept.
std::vector<Word> encode_packet(const Packet& p);
Packet decode_packet(std::span<const Word> words);

// Header-only view used by the switch and the receive path before the
// payload has arrived.
struct HeaderView {
  NetHeader net;
  RdmaHeader rdma;
};
HeaderView decode_header(std::span<const Word, kHeaderWords> words);
DnpId header_dest(Word w0);

Word encode_footer(const Footer& f);
Footer decode_footer(Word w);

enum class FlitKind : std::uint8_t { Head, Body, Tail };

struct Flit {
  Word word = 0;
  FlitKind kind = FlitKind::Body;
  std::uint32_t packet_uid = 0;  // simulation bookkeeping, not on the wire
  std::uint16_t index = 0;       // word position within the packet
};

// Envelope words are HEAD (header) and TAIL (footer); payload words are BODY.
std::vector<Flit> to_flits(std::span<const Word> words, std::uint32_t packet_uid);
inline bool is_envelope(FlitKind k) { return k != FlitKind::Body; }

// Payload sizes of the packets a message of `length` words is cut into.
std::vector<std::uint32_t> fragment_message(std::uint32_t length);
inline std::uint32_t fragment_count(std::uint32_t length) {
  return (length + kMaxPayloadWords - 1) / kMaxPayloadWords;
}

// Debug dump: one packet per line, words as 8-digit hex separated by spaces.
std::string to_hex_line(std::span<const Word> words);
std::vector<Word> parse_hex_line(std::string_view line);

}  // namespace dnp
