#include "dnp/packet.hpp"

#include <charconv>
#include <cstdio>

#include "dnp/crc16.hpp"

namespace dnp {

const char* to_string(PacketKind k) {
  switch (k) {
    case PacketKind::PutData: return "PUT_DATA";
    case PacketKind::SendData: return "SEND_DATA";
    case PacketKind::GetRequest: return "GET_REQUEST";
  }
  return "?";
}

std::optional<std::string> validate(const Packet& p) {
  if (p.payload.size() > kMaxPayloadWords) return "payload exceeds 256 words";
  if (p.payload.size() != p.net.payload_len) return "payload_len does not match payload size";
  if (p.net.vc_hint > 3) return "vc_hint exceeds 2 bits";
  if (p.rdma.msg_id > kMsgIdMask) return "msg_id exceeds 8 bits";
  if (p.rdma.length_total > kMaxMessageWords) return "length_total exceeds 20 bits";
  switch (p.net.kind) {
    case PacketKind::GetRequest:
      if (p.net.payload_len != 0) return "GET_REQUEST carries a payload";
      if (p.rdma.seq != 0) return "GET_REQUEST carries a sequence number";
      break;
    case PacketKind::SendData:
      if (p.rdma.target_addr != 0) return "SEND_DATA carries a non-null target address";
      [[fallthrough]];
    case PacketKind::PutData:
      if (p.rdma.aux_addr != 0) return "data packet carries an aux address";
      break;
  }
  return std::nullopt;
}

Word encode_footer(const Footer& f) {
  return static_cast<Word>(f.crc) | (f.corrupted ? (1u << 16) : 0u);
}

Footer decode_footer(Word w) {
  return Footer{static_cast<std::uint16_t>(w & 0xFFFFu), ((w >> 16) & 1u) != 0};
}

DnpId header_dest(Word w0) { return DnpId(w0 & kDnpIdMask); }

std::vector<Word> encode_packet(const Packet& p) {
  if (p.payload.size() > kMaxPayloadWords || p.net.payload_len > kMaxPayloadWords) {
    throw MalformedPacket("oversize payload: " + std::to_string(p.payload.size()) + " words");
  }
  if (auto err = validate(p)) throw MalformedPacket(*err);

  const auto& n = p.net;
  const auto& r = p.rdma;
  std::vector<Word> out;
  out.reserve(p.word_count());
  out.push_back(n.dest.raw() | (static_cast<Word>(n.kind) << 18) | (static_cast<Word>(n.vc_hint) << 20) |
                (static_cast<Word>(n.payload_len) << 22));
  out.push_back(n.source.raw() | (r.msg_id << 18) | ((r.length_total >> 14) << 26));
  out.push_back(r.target_addr);
  out.push_back(n.kind == PacketKind::GetRequest ? r.aux_addr : r.seq);
  out.push_back(r.aux_dnp.raw() | ((r.length_total & 0x3FFFu) << 18));
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  Footer f = p.footer;
  f.crc = crc16_words(p.payload);
  out.push_back(encode_footer(f));
  return out;
}

HeaderView decode_header(std::span<const Word, kHeaderWords> w) {
  HeaderView h;
  const Word kind = (w[0] >> 18) & 0x3u;
  if (kind > 2) throw MalformedPacket("invalid packet kind " + std::to_string(kind));
  if (w[0] >> 31) throw MalformedPacket("reserved header bit set");
  h.net.dest = DnpId(w[0] & kDnpIdMask);
  h.net.kind = static_cast<PacketKind>(kind);
  h.net.vc_hint = static_cast<std::uint8_t>((w[0] >> 20) & 0x3u);
  h.net.payload_len = static_cast<std::uint16_t>((w[0] >> 22) & 0x1FFu);
  if (h.net.payload_len > kMaxPayloadWords) throw MalformedPacket("payload_len exceeds 256");
  h.net.source = DnpId(w[1] & kDnpIdMask);
  h.rdma.msg_id = (w[1] >> 18) & kMsgIdMask;
  h.rdma.length_total = ((w[1] >> 26) << 14) | (w[4] >> 18);
  h.rdma.target_addr = w[2];
  if (h.net.kind == PacketKind::GetRequest) {
    h.rdma.aux_addr = w[3];
  } else {
    h.rdma.seq = w[3];
  }
  h.rdma.aux_dnp = DnpId(w[4] & kDnpIdMask);
  return h;
}

Packet decode_packet(std::span<const Word> words) {
  if (words.size() < kEnvelopeWords || words.size() > kMaxPacketWords) {
    throw MalformedPacket("packet length " + std::to_string(words.size()) + " outside [6, 262]");
  }
  auto h = decode_header(words.first<kHeaderWords>());
  if (words.size() != kEnvelopeWords + h.net.payload_len) {
    throw MalformedPacket("payload_len " + std::to_string(h.net.payload_len) +
                          " inconsistent with sequence length " + std::to_string(words.size()));
  }
  Packet p;
  p.net = h.net;
  p.rdma = h.rdma;
  p.payload.assign(words.begin() + kHeaderWords, words.end() - 1);
  p.footer = decode_footer(words.back());
  if (crc16_words(p.payload) != p.footer.crc) p.footer.corrupted = true;
  return p;
}

std::vector<Flit> to_flits(std::span<const Word> words, std::uint32_t packet_uid) {
  std::vector<Flit> flits;
  flits.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    FlitKind k = FlitKind::Body;
    if (i < kHeaderWords) k = FlitKind::Head;
    if (i + 1 == words.size()) k = FlitKind::Tail;
    flits.push_back(Flit{words[i], k, packet_uid, static_cast<std::uint16_t>(i)});
  }
  return flits;
}

std::vector<std::uint32_t> fragment_message(std::uint32_t length) {
  if (length == 0) throw Error("empty message");
  std::vector<std::uint32_t> out(length / kMaxPayloadWords, static_cast<std::uint32_t>(kMaxPayloadWords));
  if (length % kMaxPayloadWords) out.push_back(length % kMaxPayloadWords);
  return out;
}

std::string to_hex_line(std::span<const Word> words) {
  std::string s;
  s.reserve(words.size() * 9);
  char buf[16];
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%08x", i ? " " : "", words[i]);
    s += buf;
  }
  return s;
}

std::vector<Word> parse_hex_line(std::string_view line) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    auto tok = line.substr(i, j - i);
    if (tok.starts_with("0x") || tok.starts_with("0X")) tok.remove_prefix(2);
    Word w = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), w, 16);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw MalformedPacket("bad hex word '" + std::string(line.substr(i, j - i)) + "'");
    }
    out.push_back(w);
    i = j;
  }
  return out;
}

}  // namespace dnp
