#include "dnp/link.hpp"

#include <bit>
#include <cstdio>
#include <cstdlib>

namespace dnp {

std::string link_stats_csv_header() {
  return "link,cycles_busy,words,retransmissions,injected_errors,injected_frames,flagged_payloads,detected_envelope,"
         "undetected,max_disparity";
}

std::string to_csv(const LinkStats& s) {
  char buf[256];
  using ull = unsigned long long;
  std::snprintf(buf, sizeof buf, "%s,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%d", s.id.c_str(), ull{s.cycles_busy},
                ull{s.words}, ull{s.retransmissions}, ull{s.injected_errors}, ull{s.injected_frames},
                ull{s.flagged_payloads}, ull{s.detected_envelope}, ull{s.undetected}, s.max_disparity);
  return buf;
}

// ------------------------------------------------------------ fault injector

FaultInjector::FaultInjector(double ber, std::uint64_t seed) : ber_(ber), rng_(seed) {
  if (ber_ > 0.0) {
    gap_.emplace(ber_);
    next_error_ = (*gap_)(rng_);
  }
}

Word FaultInjector::next_mask() {
  Word m = 0;
  if (gap_) {
    while (next_error_ < pos_ + 32) {
      m ^= Word{1} << (next_error_ - pos_);
      next_error_ += 1 + (*gap_)(rng_);
    }
  }
  pos_ += 32;
  return m;
}

void FaultInjector::arm(FlitKind kind, int bit, std::optional<std::uint16_t> index) {
  armed_.push_back({kind, bit & 31, index});
}

Word FaultInjector::armed_mask(const Flit& f) {
  for (auto it = armed_.begin(); it != armed_.end(); ++it) {
    if (it->kind == f.kind && (!it->index || *it->index == f.index)) {
      const Word m = Word{1} << it->bit;
      armed_.erase(it);
      return m;
    }
  }
  return 0;
}

// ---------------------------------------------------------------- base link

Link::Link(std::string id, LinkEnd from, LinkEnd to, StatsLedger* ledger) : from_(from), to_(to), ledger_(ledger) {
  stats_.id = std::move(id);
}

void Link::deliver_credits(Cycle now) {
  while (!credits_.empty() && credits_.front().first <= now) {
    from_.sw->return_credit(from_.port, credits_.front().second);
    credits_.pop_front();
  }
}

Flit DniChecker::check(const Flit& f) {
  Flit g = f;
  if (f.kind == FlitKind::Head && f.index == 0) crc_.reset();
  if (f.kind == FlitKind::Body) crc_.update_word(f.word);
  if (f.kind == FlitKind::Tail) {
    auto footer = decode_footer(f.word);
    if (footer.crc != crc_.value()) {
      footer.corrupted = true;
      g.word = encode_footer(footer);
    }
  }
  return g;
}

// ------------------------------------------------------------- on-chip link

OnChipLink::OnChipLink(std::string id, LinkEnd from, LinkEnd to, int latency, double ber, std::uint64_t seed,
                       StatsLedger* ledger)
    : Link(std::move(id), from, to, ledger), latency_(latency), faults_(ber, seed) {}

void OnChipLink::send(int vc, const Flit& f, Cycle now) {
  Flit g = f;
  if (f.kind == FlitKind::Body) {
    // Only the payload is exposed on chip; the envelope travels on protected wires.
    const Word mask = faults_.next_mask() | faults_.armed_mask(f);
    if (mask) {
      g.word ^= mask;
      stats_.injected_errors += static_cast<std::uint64_t>(std::popcount(mask));
      ++stats_.injected_frames;
      if (ledger_ && f.packet_uid) ++ledger_->packet(f.packet_uid).payload_errors_injected;
    }
  }
  ++stats_.words;
  ++stats_.cycles_busy;
  q_.push_back({now + static_cast<Cycle>(latency_), vc, dni_.check(g)});
}

void OnChipLink::tick(Cycle now) {
  while (!q_.empty() && q_.front().due <= now) {
    to_.sw->accept(to_.port, q_.front().vc, q_.front().flit, now);
    q_.pop_front();
  }
  deliver_credits(now);
}

// ------------------------------------------------------------ off-chip link

OffChipLink::OffChipLink(std::string id, LinkEnd from, LinkEnd to, Params p, StatsLedger* ledger)
    : Link(std::move(id), from, to, ledger), p_(p), faults_(p.ber, p.seed), flagged_(8, false) {
  credit_latency_ = static_cast<Cycle>(p.pipeline);
}

std::uint16_t OffChipLink::frame_crc(Word w, std::uint32_t seq, bool envelope) {
  Crc16 c;
  c.update_word(w);
  c.update(static_cast<std::uint8_t>(seq >> 8));
  c.update(static_cast<std::uint8_t>(seq));
  c.update(envelope ? 1 : 0);
  return c.value();
}

void OffChipLink::send(int vc, const Flit& f, Cycle) {
  tx_.push_back(Frame{f, vc, next_seq_++, is_envelope(f.kind), 0});
}

bool OffChipLink::idle() const {
  return tx_.empty() && retx_.empty() && held_.empty() && wire_.empty() && naks_.empty() && reorder_.empty() &&
         credits_.empty();
}

void OffChipLink::transmit(Cycle now) {
  Frame fr;
  if (!retx_.empty()) {
    auto it = held_.find(retx_.front());
    retx_.pop_front();
    if (it == held_.end()) return;
    fr = it->second;
    ++stats_.retransmissions;
    if (fr.attempts > p_.retry_limit && !fault_) {
      fault_ = true;
      from_.sw->regs().raise(reg::kStatusLinkFault);
    }
  } else if (!tx_.empty()) {
    fr = tx_.front();
    tx_.pop_front();
  } else {
    return;
  }
  ++fr.attempts;
  if (fr.envelope) held_[fr.seq] = fr;

  const auto enc = balancer_.encode(fr.flit.word);
  const Word mask = faults_.next_mask() | faults_.armed_mask(fr.flit);
  const auto W = static_cast<Cycle>(p_.word_cycles);
  ++stats_.words;
  stats_.cycles_busy += W;
  stats_.max_disparity = std::max(stats_.max_disparity, std::abs(enc.disparity));
  if (mask) {
    stats_.injected_errors += static_cast<std::uint64_t>(std::popcount(mask));
    ++stats_.injected_frames;
    if (ledger_ && fr.flit.packet_uid && fr.flit.kind == FlitKind::Body) {
      ++ledger_->packet(fr.flit.packet_uid).payload_errors_injected;
    }
  }
  if (ledger_ && fr.flit.packet_uid && fr.flit.kind == FlitKind::Head && fr.flit.index == 0) {
    auto& r = ledger_->packet(fr.flit.packet_uid);
    if (r.head_on_link == kNever) r.head_on_link = now;
  }
  wire_.push_back({now + W + static_cast<Cycle>(p_.pipeline), fr, enc.transmitted ^ mask, enc.inverted,
                   frame_crc(fr.flit.word, fr.seq, fr.envelope), mask});
  busy_until_ = now + W;
}

void OffChipLink::receive(const OnWire& w, Cycle now) {
  const Word word = dc_balance_decode(w.line, w.inverted);
  const bool ok = frame_crc(word, w.frame.seq, w.frame.envelope) == w.crc;
  if (w.frame.envelope) {
    if (!ok) {
      ++stats_.detected_envelope;
      naks_.push_back({now + static_cast<Cycle>(p_.pipeline), w.frame.seq});
      return;
    }
    held_.erase(w.frame.seq);
  }
  if (ok && w.mask) ++stats_.undetected;
  Flit f = w.frame.flit;
  f.word = word;
  if (!ok) {
    ++stats_.flagged_payloads;
    flagged_[static_cast<std::size_t>(w.frame.vc)] = true;
  }
  reorder_.emplace(w.frame.seq, std::make_pair(w.frame.vc, f));
  release(now);
}

void OffChipLink::release(Cycle now) {
  for (auto it = reorder_.begin(); it != reorder_.end() && it->first == expect_; it = reorder_.erase(it)) {
    auto [vc, f] = it->second;
    if (f.kind == FlitKind::Tail && flagged_[static_cast<std::size_t>(vc)]) {
      auto footer = decode_footer(f.word);
      footer.corrupted = true;
      f.word = encode_footer(footer);
      flagged_[static_cast<std::size_t>(vc)] = false;
    }
    to_.sw->accept(to_.port, vc, f, now);
    ++expect_;
  }
}

void OffChipLink::tick(Cycle now) {
  while (!naks_.empty() && naks_.front().first <= now) {
    retx_.push_back(naks_.front().second);
    naks_.pop_front();
  }
  while (!wire_.empty() && wire_.front().arrive <= now) {
    const OnWire w = wire_.front();
    wire_.pop_front();
    receive(w, now);
  }
  deliver_credits(now);
  if (now >= busy_until_) transmit(now);
}

// ---------------------------------------------------------------------- NoC

class Noc::Ingress : public FlitChannel {
 public:
  Ingress(Noc& noc, int w) : noc_(noc), w_(w) {}
  void send(int, const Flit& f, Cycle now) override {
    noc_.tiles_[static_cast<std::size_t>(w_)].fifo.push_back({f, now});
  }

 private:
  Noc& noc_;
  int w_;
};

class Noc::Egress : public CreditSink {
 public:
  Egress(Noc& noc, int w) : noc_(noc), w_(w) {}
  void credit(int, Cycle now) override { noc_.egress_credits_.push_back({now + 1, w_}); }

 private:
  Noc& noc_;
  int w_;
};

Noc::Noc(std::string id, const AddressLayout& layout, int latency, int ingress_depth, double ber,
         std::uint64_t seed, StatsLedger* ledger)
    : id_(std::move(id)),
      layout_(layout),
      latency_(latency),
      depth_(ingress_depth),
      faults_(ber, seed),
      ledger_(ledger) {
  stats_.id = id_;
}

Noc::~Noc() = default;

void Noc::attach(int w, Switch* sw, int port) {
  if (static_cast<int>(tiles_.size()) <= w) tiles_.resize(static_cast<std::size_t>(w) + 1);
  auto& t = tiles_[static_cast<std::size_t>(w)];
  t.sw = sw;
  t.port = port;
  t.in = std::make_unique<Ingress>(*this, w);
  t.out = std::make_unique<Egress>(*this, w);
  t.credits = sw->depth(port);
  sw->connect_output(port, t.in.get(), depth_);
  sw->connect_upstream(port, t.out.get());
}

bool Noc::idle() const {
  if (!wire_.empty() || !ingress_credits_.empty() || !egress_credits_.empty()) return false;
  for (const auto& t : tiles_) {
    if (!t.fifo.empty()) return false;
  }
  return true;
}

void Noc::tick(Cycle now) {
  while (!wire_.empty() && wire_.front().due <= now) {
    auto& t = tiles_[static_cast<std::size_t>(wire_.front().to)];
    t.sw->accept(t.port, 0, wire_.front().flit, now);
    wire_.pop_front();
  }
  while (!ingress_credits_.empty() && ingress_credits_.front().first <= now) {
    auto& t = tiles_[static_cast<std::size_t>(ingress_credits_.front().second)];
    t.sw->return_credit(t.port, 0);
    ingress_credits_.pop_front();
  }
  while (!egress_credits_.empty() && egress_credits_.front().first <= now) {
    ++tiles_[static_cast<std::size_t>(egress_credits_.front().second)].credits;
    egress_credits_.pop_front();
  }

  const int T = static_cast<int>(tiles_.size());
  std::vector<bool> egress_used(static_cast<std::size_t>(T), false);
  bool moved_any = false;
  for (int k = 0; k < T; ++k) {
    const int i = (rr_ + k) % T;
    auto& src = tiles_[static_cast<std::size_t>(i)];
    if (src.fifo.empty() || src.fifo.front().arrival >= now) continue;
    const Flit& f = src.fifo.front().flit;
    if (src.target < 0) {
      const DnpId dest = header_dest(f.word);
      src.target = layout_.contains(dest) && layout_.dims() == 4 ? layout_.decode(dest)[3] : i;
      if (src.target >= T) src.target = i;
    }
    auto& dst = tiles_[static_cast<std::size_t>(src.target)];
    if (egress_used[static_cast<std::size_t>(src.target)]) continue;
    if (dst.owner != -1 && dst.owner != i) continue;
    if (dst.credits == 0) continue;
    dst.owner = i;
    --dst.credits;
    egress_used[static_cast<std::size_t>(src.target)] = true;
    Flit g = f;
    if (g.kind == FlitKind::Body) {
      const Word mask = faults_.next_mask() | faults_.armed_mask(g);
      if (mask) {
        g.word ^= mask;
        stats_.injected_errors += static_cast<std::uint64_t>(std::popcount(mask));
        ++stats_.injected_frames;
        if (ledger_ && g.packet_uid) ++ledger_->packet(g.packet_uid).payload_errors_injected;
      }
    }
    wire_.push_back({now + static_cast<Cycle>(latency_), src.target, dst.dni.check(g)});
    ingress_credits_.push_back({now + 1, i});
    ++stats_.words;
    moved_any = true;
    if (f.kind == FlitKind::Tail) {
      dst.owner = -1;
      src.target = -1;
    }
    src.fifo.pop_front();
  }
  if (moved_any) ++stats_.cycles_busy;
  if (T > 0) rr_ = (rr_ + 1) % T;
}

}  // namespace dnp
