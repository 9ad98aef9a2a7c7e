#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include "sim_helpers.hpp"

using namespace dnp;
using namespace dnp::testing;

namespace {

struct Pair {
  Simulator sim;
  DnpId a;
  DnpId b;
  explicit Pair(const SimConfig& cfg, std::size_t dst_index = 1)
      : sim(cfg), a(sim.id_at(0)), b(sim.id_at(dst_index)) {
    sim.register_buffer(b, 0, {0, 1u << 19, true, true});
  }
  void put(std::uint32_t len, Cycle at = 0) {
    fill(sim, a, 0, len);
    sim.schedule(a, command(CommandCode::Put, a, b, len, 0, 0x1000), at);
  }
  bool data_intact(std::uint32_t len) {
    for (std::uint32_t i = 0; i < len; ++i) {
      if (sim.memory(b).read(0x1000 + i) != sim.memory(a).read(i)) return false;
    }
    return true;
  }
  OffChipLink& link() { return *sim.offchip_link(a, Dir::XPlus); }
};

}  // namespace

TEST_CASE("off-chip link at BER 0 delivers identical data at the line rate") {
  Pair p(presets::shapes());
  p.put(256);
  auto r = p.sim.run_until_drain(100000);
  REQUIRE(r.drained);
  CHECK(p.data_intact(256));
  const auto& s = p.link().stats();
  CHECK(s.words == 262);
  CHECK(s.cycles_busy == 262 * 8);
  CHECK(s.retransmissions == 0);
  CHECK(s.injected_frames == 0);
  CHECK(s.max_disparity <= 32);
  const auto& rec = p.sim.ledger().packets().at(0);
  CHECK(rec.envelope_intact);
  CHECK_FALSE(rec.corrupted_flag);
  CHECK(rec.hops == 1);
  CHECK(events_at(p.sim, p.b, EventKind::PktReceived).at(0).status == 0);
}

TEST_CASE("a flipped header bit is caught by the frame CRC and resent") {
  for (std::uint16_t index : {0, 2, 4}) {
    Pair p(presets::shapes());
    p.link().faults().arm(FlitKind::Head, 7, index);
    p.put(16);
    REQUIRE(p.sim.run_until_drain(100000).drained);
    const auto& s = p.link().stats();
    CHECK(s.injected_frames == 1);
    CHECK(s.detected_envelope == 1);
    CHECK(s.retransmissions == 1);
    CHECK(s.undetected == 0);
    CHECK(p.link().retransmit_buffer_size() == 0);
    const auto& rec = p.sim.ledger().packets().at(0);
    CHECK(rec.envelope_intact);
    CHECK_FALSE(rec.corrupted_flag);
    CHECK(p.data_intact(16));
    CHECK(events_at(p.sim, p.b, EventKind::PktReceived).at(0).status == 0);
  }
}

TEST_CASE("a flipped footer bit is resent; the footer is part of the envelope") {
  Pair p(presets::shapes());
  p.link().faults().arm(FlitKind::Tail, 20);
  p.put(16);
  REQUIRE(p.sim.run_until_drain(100000).drained);
  CHECK(p.link().stats().retransmissions == 1);
  CHECK(events_at(p.sim, p.b, EventKind::PktReceived).at(0).status == 0);
}

TEST_CASE("a flipped payload bit is delivered once and marked corrupted") {
  Pair p(presets::shapes());
  p.link().faults().arm(FlitKind::Body, 3, 9);
  p.put(16);
  REQUIRE(p.sim.run_until_drain(100000).drained);
  const auto& s = p.link().stats();
  CHECK(s.retransmissions == 0);
  CHECK(s.flagged_payloads == 1);
  const auto& rec = p.sim.ledger().packets().at(0);
  CHECK(rec.payload_errors_injected == 1);
  CHECK(rec.corrupted_flag);
  CHECK(rec.envelope_intact);
  CHECK(rec.words_written == 16);
  // exactly one bit of word 4 (frame index 9) differs
  int diff = 0;
  for (std::uint32_t i = 0; i < 16; ++i) {
    diff += std::popcount(p.sim.memory(p.b).read(0x1000 + i) ^ p.sim.memory(p.a).read(i));
  }
  CHECK(diff == 1);
  CHECK(p.sim.memory(p.b).read(0x1004) == (p.sim.memory(p.a).read(4) ^ 8u));
  const auto ev = events_at(p.sim, p.b, EventKind::PktReceived).at(0);
  CHECK((ev.status & status::kCorrupted) != 0);
}

TEST_CASE("a corruption mark survives a second hop") {
  Pair p(presets::shapes(), 3);  // (1,1,0): two off-chip hops, Y first
  p.sim.offchip_link(p.a, Dir::YPlus)->faults().arm(FlitKind::Body, 0);
  p.put(32);
  REQUIRE(p.sim.run_until_drain(100000).drained);
  const auto& rec = p.sim.ledger().packets().at(0);
  CHECK(rec.hops == 2);
  CHECK(rec.corrupted_flag);
  CHECK((events_at(p.sim, p.b, EventKind::PktReceived).at(0).status & status::kCorrupted) != 0);
}

TEST_CASE("persistent header errors raise the link fault bit but the packet still arrives") {
  auto cfg = presets::shapes();
  cfg.link.retry_limit = 3;
  Pair p(cfg);
  for (int i = 0; i < 6; ++i) p.link().faults().arm(FlitKind::Head, 1, 0);
  p.put(4);
  REQUIRE(p.sim.run_until_drain(100000).drained);
  CHECK(p.link().stats().retransmissions == 6);
  CHECK(p.link().fault_raised());
  CHECK((p.sim.read_register(p.a, reg::kStatus) & reg::kStatusLinkFault) != 0);
  CHECK(p.data_intact(4));
  CHECK(p.sim.ledger().packets().at(0).envelope_intact);
}

TEST_CASE("retransmission keeps order: frames after a NAKed one wait in the reorder buffer") {
  Pair p(presets::shapes());
  p.link().faults().arm(FlitKind::Head, 12, 3);
  p.put(200);
  p.put(200, 1);
  REQUIRE(p.sim.run_until_drain(200000).drained);
  CHECK(p.data_intact(200));
  for (const auto& rec : p.sim.ledger().packets()) {
    CHECK(rec.envelope_intact);
    CHECK(rec.delivered);
  }
}

TEST_CASE("frame CRC detects every single and double bit error of a word") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 64; ++t) {
    const auto w = static_cast<Word>(rng());
    const auto seq = static_cast<std::uint32_t>(rng() & 0xFFFF);
    const auto c = OffChipLink::frame_crc(w, seq, true);
    for (int i = 0; i < 32; ++i) {
      CHECK(OffChipLink::frame_crc(w ^ (1u << i), seq, true) != c);
      for (int j = i + 1; j < 32; ++j) {
        if (OffChipLink::frame_crc(w ^ (1u << i) ^ (1u << j), seq, true) == c) FAIL("double-bit error missed");
      }
    }
    CHECK(OffChipLink::frame_crc(w, seq + 1, true) != c);
    CHECK(OffChipLink::frame_crc(w, seq, false) != c);
  }
}

TEST_CASE("DC balance keeps the running disparity bounded on a skewed stream") {
  DcBalancer b;
  std::mt19937_64 rng(5);
  int worst = 0;
  for (int i = 0; i < 5000; ++i) {
    // mostly-ones words push the line one way
    const Word w = static_cast<Word>(rng()) | static_cast<Word>(rng()) | 0xF0F0F0F0u;
    const auto e = b.encode(w);
    CHECK(dc_balance_decode(e.transmitted, e.inverted) == w);
    worst = std::max(worst, std::abs(e.disparity));
  }
  CHECK(worst <= 32);
}

TEST_CASE("fault injector: Binomial counts, seeded, silent at BER 0") {
  FaultInjector zero(0.0, 1);
  for (int i = 0; i < 1000; ++i) CHECK(zero.next_mask() == 0);

  const double ber = 1e-3;
  const int words = 200000;
  FaultInjector a(ber, 42), b(ber, 42);
  std::uint64_t flips = 0;
  bool same = true;
  for (int i = 0; i < words; ++i) {
    const Word m = a.next_mask();
    same = same && (m == b.next_mask());
    flips += static_cast<std::uint64_t>(std::popcount(m));
  }
  CHECK(same);
  const double n = 32.0 * words;
  const double mean = n * ber;
  const double sigma = std::sqrt(n * ber * (1 - ber));
  CHECK(std::abs(static_cast<double>(flips) - mean) < 5 * sigma);
}

TEST_CASE("random off-chip errors: every payload hit is flagged, every envelope hit is resent") {
  auto cfg = presets::shapes();
  cfg.link.offchip_ber = 2e-4;
  cfg.seed = 99;
  Simulator sim(cfg);
  for (std::size_t i = 0; i < sim.tile_count(); ++i) {
    const DnpId src = sim.id_at(i);
    const DnpId dst = sim.id_at((i + 3) % sim.tile_count());
    sim.register_buffer(dst, 0, {0, 1u << 19, true, true});
    fill(sim, src, 0, 2048);
    sim.schedule(src, command(CommandCode::Put, src, dst, 2048, 0, 0x10000 + static_cast<std::uint32_t>(i) * 4096,
                              static_cast<std::uint32_t>(i)),
                 0);
  }
  REQUIRE(sim.run_until_drain(2000000).drained);
  std::uint64_t injected = 0, accounted = 0, retx = 0;
  for (const auto& l : sim.offchip_links()) {
    const auto& s = l->stats();
    injected += s.injected_frames;
    accounted += s.detected_envelope + s.flagged_payloads + s.undetected;
    retx += s.retransmissions;
    CHECK(s.undetected == 0);
    CHECK(s.retransmissions == s.detected_envelope);
  }
  CHECK(injected > 0);
  CHECK(retx > 0);
  CHECK(injected == accounted);
  int hit = 0;
  for (const auto& rec : sim.ledger().packets()) {
    CHECK(rec.envelope_intact);
    CHECK(rec.delivered);
    CHECK(rec.corrupted_flag == (rec.payload_errors_injected > 0));
    if (rec.payload_errors_injected > 0) {
      ++hit;
      CHECK((rec.event_status & status::kCorrupted) != 0);
    }
  }
  CHECK(hit > 0);
  CHECK(sim.ledger().conserved());
}

TEST_CASE("on-chip mesh link: payload errors are marked by the interface check") {
  auto cfg = presets::mt2d();
  Pair p(cfg, 8);  // tile w=1 of the same chip, one mesh hop east
  auto* l = p.sim.mesh_link(p.a, 0);
  REQUIRE(l != nullptr);
  CHECK(l->to().sw == &p.sim.switch_of(p.b));
  l->faults().arm(FlitKind::Body, 30);
  p.put(8);
  REQUIRE(p.sim.run_until_drain(100000).drained);
  const auto& rec = p.sim.ledger().packets().at(0);
  CHECK(rec.corrupted_flag);
  CHECK(rec.envelope_intact);
  CHECK(rec.hops == 1);
  CHECK((events_at(p.sim, p.b, EventKind::PktReceived).at(0).status & status::kCorrupted) != 0);
}

TEST_CASE("NoC transport: in-order delivery, payload errors marked") {
  {
    Pair p(presets::mtnoc(), 8);
    p.put(300);
    REQUIRE(p.sim.run_until_drain(100000).drained);
    CHECK(p.data_intact(300));
    CHECK(p.sim.noc_of(p.a)->stats().words == 2 * 6 + 300);
    CHECK(p.sim.ledger().packets().at(0).hops == 1);
  }
  {
    Pair p(presets::mtnoc(), 8);
    p.sim.noc_of(p.a)->faults().arm(FlitKind::Body, 0);
    p.put(20);
    REQUIRE(p.sim.run_until_drain(100000).drained);
    CHECK(p.sim.ledger().packets().at(0).corrupted_flag);
    CHECK(p.sim.noc_of(p.a)->stats().injected_frames == 1);
  }
}

TEST_CASE("link stats CSV has one column per header field") {
  LinkStats s;
  s.id = "x";
  const auto header = link_stats_csv_header();
  const auto row = to_csv(s);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}
