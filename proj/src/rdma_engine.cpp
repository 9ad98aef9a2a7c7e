#include "dnp/rdma_engine.hpp"

#include <algorithm>

namespace dnp {

namespace {
constexpr std::size_t kStagingWords = 16;

bool is_error_status(std::uint32_t s) { return (s & ~(status::kCorrupted | status::kGetServed)) != 0; }
}  // namespace

RdmaEngine::RdmaEngine(Params p, TileMemory& mem, StatsLedger* ledger)
    : p_(p),
      mem_(mem),
      ledger_(ledger),
      ports_(p.master_ports),
      fifo_(static_cast<std::size_t>(p.rdma.cmd_fifo_depth)),
      cq_(static_cast<std::size_t>(p.rdma.cq_depth)),
      lut_(static_cast<std::size_t>(p.rdma.lut_entries)),
      rx_(static_cast<std::size_t>(std::max(1, p.master_ports))),
      rx_capacity_(static_cast<std::size_t>(p.timing.rx_write_delay) + 16) {}

PushResult RdmaEngine::push_command(const CommandWords& w, Cycle now) {
  if (!fifo_.push(w, now)) return PushResult::Backpressure;
  ++accepted_;
  return PushResult::Accepted;
}

bool RdmaEngine::post(CompletionEvent e, Cycle now) {
  e.cycle = now;
  return cq_.push(e);
}

bool RdmaEngine::valid_remote(DnpId id) const { return p_.layout == nullptr || p_.layout->contains(id); }

bool RdmaEngine::idle() const {
  if (act_.phase != Phase::Idle || !fifo_.empty() || !get_jobs_.empty()) return false;
  return std::all_of(rx_.begin(), rx_.end(), [](const RxChannel& c) { return c.q.empty() && !c.cur && c.header.empty(); });
}

// ---------------------------------------------------------------- transmit

std::vector<RdmaEngine::PacketPlan> RdmaEngine::plan_data(PacketKind kind, DnpId dest, std::uint32_t dst_addr,
                                                          std::uint32_t length, DnpId aux) {
  std::vector<PacketPlan> plan;
  const auto msg = next_msg_id();
  std::uint32_t offset = 0;
  std::uint32_t seq = 0;
  for (auto len : fragment_message(length)) {
    const std::uint32_t target = kind == PacketKind::SendData ? 0 : dst_addr + offset;
    plan.push_back({kind, dest, target, seq++, len, msg, aux, 0, length});
    offset += len;
  }
  return plan;
}

void RdmaEngine::build_header(const PacketPlan& pp) {
  Packet p;
  p.net.dest = pp.dest;
  p.net.source = p_.id;
  p.net.kind = pp.kind;
  p.net.payload_len = static_cast<std::uint16_t>(pp.len);
  p.rdma.target_addr = pp.target_addr;
  p.rdma.aux_dnp = pp.aux_dnp;
  p.rdma.aux_addr = pp.aux_addr;
  p.rdma.msg_id = pp.msg_id;
  p.rdma.seq = pp.seq;
  p.rdma.length_total = pp.length_total;
  p.payload.assign(pp.len, 0);
  auto words = encode_packet(p);
  act_.header.assign(words.begin(), words.begin() + kHeaderWords);
}

void RdmaEngine::start_job(Cycle now) {
  Job job;
  if (!get_jobs_.empty()) {
    job = get_jobs_.front();
    get_jobs_.pop_front();
  } else if (!fifo_.empty()) {
    job.type = Job::Type::Command;
    job.words = fifo_.front().words;
    job.arrival = fifo_.front().enqueued;
    fifo_.pop();
  } else {
    return;
  }
  act_ = Active{};
  act_.job = job;
  act_.phase = Phase::Waiting;
  act_.start = std::max<Cycle>(job.arrival + static_cast<Cycle>(p_.timing.issue_to_read), now);
}

void RdmaEngine::begin_active(Cycle) {
  auto& a = act_;
  auto fail = [&](std::uint32_t st, std::uint32_t tag, std::uint32_t addr, std::uint32_t len, DnpId peer) {
    a.final_event = CompletionEvent{EventKind::Error, tag, st, addr, len, peer, 0};
    a.phase = Phase::Finish;
  };
  auto start_stream = [&](std::vector<PacketPlan> plan, std::uint32_t src, std::uint32_t to_read) {
    a.plan = std::move(plan);
    a.src_addr = src;
    a.to_read = to_read;
    a.next_push = a.start + static_cast<Cycle>(p_.timing.packetize);
    a.phase = Phase::Stream;
  };

  if (a.job.type == Job::Type::GetResponse) {
    const auto& j = a.job;
    if (!mem_.in_bounds(j.src_addr, j.length)) {
      fail(status::kMemoryFault | status::kGetServed, j.req_msg_id, j.src_addr, j.length, j.initiator);
      // Tell the destination that no data is coming.
      start_stream({{PacketKind::PutData, j.dst_dnp, j.dst_addr, 0, 0, next_msg_id(), j.initiator, 0, 0}}, 0, 0);
      return;
    }
    a.final_event =
        CompletionEvent{EventKind::PktReceived, j.req_msg_id, status::kGetServed, j.src_addr, j.length, j.initiator, 0};
    start_stream(plan_data(PacketKind::PutData, j.dst_dnp, j.dst_addr, j.length, j.initiator), j.src_addr, j.length);
    return;
  }

  RdmaCommand c;
  try {
    c = RdmaCommand::decode(a.job.words);
  } catch (const MalformedPacket&) {
    fail(status::kDecodeError, a.job.words[6], 0, 0, DnpId{});
    return;
  }
  a.cmd = c;
  if (c.length == 0 || c.length > kMaxMessageWords) {
    fail(status::kBadCommand, c.tag, c.dst_addr, c.length, c.dst_dnp);
    return;
  }
  if (c.notify) {
    a.final_event = CompletionEvent{EventKind::CmdDone, c.tag, 0, c.dst_addr, c.length, c.dst_dnp, 0};
  }
  switch (c.code) {
    case CommandCode::Loopback:
      if (c.src_dnp != p_.id || c.dst_dnp != p_.id) return fail(status::kBadCommand, c.tag, c.dst_addr, c.length, c.dst_dnp);
      if (!mem_.in_bounds(c.src_addr, c.length) || !mem_.in_bounds(c.dst_addr, c.length)) {
        return fail(status::kMemoryFault, c.tag, c.dst_addr, c.length, c.dst_dnp);
      }
      a.to_read = c.length;
      a.phase = Phase::Loopback;
      a.copy_index = copies_.size();
      copies_.push_back(CopyRecord{c.tag, c.length, a.job.arrival, kNever, kNever, kNever});
      return;
    case CommandCode::Put:
    case CommandCode::Send: {
      if (!mem_.in_bounds(c.src_addr, c.length)) return fail(status::kMemoryFault, c.tag, c.dst_addr, c.length, c.dst_dnp);
      if (!valid_remote(c.dst_dnp)) return fail(status::kRouteError, c.tag, c.dst_addr, c.length, c.dst_dnp);
      const auto kind = c.code == CommandCode::Put ? PacketKind::PutData : PacketKind::SendData;
      start_stream(plan_data(kind, c.dst_dnp, c.dst_addr, c.length, p_.id), c.src_addr, c.length);
      return;
    }
    case CommandCode::Get:
      if (!valid_remote(c.src_dnp) || !valid_remote(c.dst_dnp)) {
        return fail(status::kRouteError, c.tag, c.dst_addr, c.length, c.dst_dnp);
      }
      start_stream({{PacketKind::GetRequest, c.src_dnp, c.dst_addr, 0, 0, next_msg_id(), c.dst_dnp, c.src_addr, c.length}},
                   0, 0);
      return;
  }
}

void RdmaEngine::tick_stream(Cycle now) {
  auto& a = act_;
  if (now >= a.start && a.read < a.to_read && a.staging.size() < kStagingWords && ports_.try_use(0)) {
    a.staging.push_back(mem_.read(a.src_addr + a.read));
    ++a.read;
  }
  if (now < a.next_push || inject_ == nullptr || !inject_->can_inject()) return;

  const auto& pp = a.plan[a.pkt];
  Flit f;
  f.index = static_cast<std::uint16_t>(a.flit);
  if (a.flit == 0) {
    build_header(pp);
    a.crc.reset();
    if (ledger_) {
      PacketRecord r;
      r.src = p_.id;
      r.dst = pp.dest;
      r.kind = pp.kind;
      r.msg_id = pp.msg_id;
      r.seq = pp.seq;
      r.payload_len = pp.len;
      r.header = a.header;
      r.issue = a.job.arrival;
      r.read_start = a.start;
      r.head_injected = now;
      a.uid = ledger_->new_packet(std::move(r));
    }
  }
  bool tail = false;
  if (a.flit < kHeaderWords) {
    f.word = a.header[a.flit];
    f.kind = FlitKind::Head;
  } else if (a.flit < kHeaderWords + pp.len) {
    if (a.staging.empty()) return;
    f.word = a.staging.front();
    a.staging.pop_front();
    a.crc.update_word(f.word);
    f.kind = FlitKind::Body;
  } else {
    f.word = encode_footer(Footer{a.crc.value(), false});
    f.kind = FlitKind::Tail;
    tail = true;
  }
  f.packet_uid = a.uid;
  inject_->inject(f, now);
  if (ledger_) ++ledger_->packet(a.uid).flits_sent;
  ++a.flit;
  if (tail) {
    a.flit = 0;
    if (++a.pkt == a.plan.size()) a.phase = Phase::Finish;
  }
}

void RdmaEngine::tick_loopback(Cycle now) {
  auto& a = act_;
  auto& rec = copies_[a.copy_index];
  if (a.read < a.to_read && ports_.try_use(0)) {
    a.inflight.emplace_back(now + static_cast<Cycle>(p_.timing.loopback_turnaround), mem_.read(a.cmd.src_addr + a.read));
    if (a.read == 0) rec.read_start = now;
    ++a.read;
  }
  if (!a.inflight.empty() && a.inflight.front().first <= now && ports_.try_use(1)) {
    mem_.write(a.cmd.dst_addr + a.written, a.inflight.front().second);
    a.inflight.pop_front();
    if (a.written == 0) rec.first_write = now;
    rec.last_write = now;
    ++a.written;
  }
  if (a.written == a.cmd.length) a.phase = Phase::Finish;
}

// ----------------------------------------------------------------- receive

bool RdmaEngine::rx_can_accept(int channel) const {
  return rx_[static_cast<std::size_t>(channel)].q.size() < rx_capacity_;
}

void RdmaEngine::rx_accept(int channel, const Flit& f, Cycle now) {
  rx_[static_cast<std::size_t>(channel)].q.push_back({f, now});
}

RdmaEngine::RxPacket RdmaEngine::begin_packet(const HeaderView& h, std::uint32_t uid) {
  RxPacket rx;
  rx.h = h;
  rx.uid = uid;
  if (h.net.dest != p_.id) {
    rx.discard = true;
    rx.status |= status::kRouteError;
    return rx;
  }
  if (h.net.kind == PacketKind::GetRequest) return rx;

  const auto key = msg_key(h.net.source, h.rdma.msg_id);
  auto it = msgs_.find(key);
  if (h.rdma.seq == 0) {
    MsgState m;
    m.kind = h.net.kind;
    m.total = h.rdma.length_total;
    if (m.total == 0) {
      m.status |= status::kRemoteFault;
    } else if (h.net.kind == PacketKind::SendData) {
      if (auto b = lut_.claim_send(m.total)) {
        m.base = *b;
      } else {
        m.status |= status::kLutMiss;
      }
    }
    m.first_addr = h.net.kind == PacketKind::SendData ? m.base : h.rdma.target_addr;
    it = msgs_.insert_or_assign(key, m).first;
  } else if (it == msgs_.end()) {
    rx.discard = true;
    rx.status |= status::kSeqError;
    return rx;
  }

  auto& m = it->second;
  const std::uint32_t len = h.net.payload_len;
  if (h.rdma.seq != m.expected_seq) rx.status |= status::kSeqError;
  if (m.total > 0) {
    const auto offset = std::uint64_t{h.rdma.seq} * kMaxPayloadWords;
    const auto expected = offset < m.total ? std::min<std::uint64_t>(kMaxPayloadWords, m.total - offset) : 0;
    if (len != expected) rx.status |= status::kSeqError;
  }
  if (rx.status || (m.status & (status::kLutMiss | status::kRemoteFault))) {
    rx.discard = true;
    return rx;
  }
  if (h.net.kind == PacketKind::PutData) {
    if (!lut_.match(h.rdma.target_addr, len)) {
      rx.status |= status::kLutMiss;
      rx.discard = true;
      return rx;
    }
    rx.base = h.rdma.target_addr;
  } else {
    rx.base = m.base + h.rdma.seq * static_cast<std::uint32_t>(kMaxPayloadWords);
  }
  if (!mem_.in_bounds(rx.base, len)) {
    rx.status |= status::kMemoryFault;
    rx.discard = true;
  }
  return rx;
}

std::optional<std::uint32_t> RdmaEngine::payload_target(const RxPacket& rx, std::uint32_t i) const {
  if (rx.discard) return std::nullopt;
  return rx.base + i;
}

void RdmaEngine::account_word(std::uint32_t uid, bool written, Cycle now) {
  if (!ledger_ || uid == 0) return;
  auto& r = ledger_->packet(uid);
  if (written) {
    if (r.words_written == 0) r.first_write = now;
    ++r.words_written;
  } else {
    ++r.words_discarded;
  }
}

bool RdmaEngine::end_packet(RxPacket& rx, const Footer& footer, Cycle now) {
  const auto& h = rx.h;
  const bool corrupted = footer.corrupted || rx.crc.value() != footer.crc;
  PacketRecord* rec = (ledger_ && rx.uid) ? &ledger_->packet(rx.uid) : nullptr;
  auto finish_record = [&](std::uint32_t st) {
    if (!rec) return;
    rec->delivered = true;
    rec->tail_done = now;
    rec->corrupted_flag = corrupted;
    rec->event_status |= st;
  };

  if (h.net.kind == PacketKind::GetRequest && rx.status == 0) {
    Job j;
    j.type = Job::Type::GetResponse;
    j.arrival = now;
    j.src_addr = h.rdma.aux_addr;
    j.dst_dnp = h.rdma.aux_dnp;
    j.dst_addr = h.rdma.target_addr;
    j.length = h.rdma.length_total;
    j.initiator = h.net.source;
    j.req_msg_id = h.rdma.msg_id;
    if (j.length == 0) {
      CompletionEvent e{EventKind::Error, h.rdma.msg_id, status::kBadCommand, j.src_addr, 0, j.initiator, 0};
      if (!post(e, now)) return false;
      finish_record(e.status);
      return true;
    }
    get_jobs_.push_back(j);
    finish_record(0);
    return true;
  }

  const auto key = msg_key(h.net.source, h.rdma.msg_id);
  auto it = msgs_.find(key);
  const bool orphan = h.net.kind == PacketKind::GetRequest || it == msgs_.end() || (rx.status & status::kRouteError);
  if (orphan) {
    CompletionEvent e{EventKind::Error, h.rdma.msg_id, rx.status | (corrupted ? status::kCorrupted : 0u),
                      h.rdma.target_addr, h.net.payload_len, h.net.source, 0};
    if (!post(e, now)) return false;
    finish_record(e.status);
    return true;
  }

  auto& m = it->second;
  const std::uint32_t st = m.status | rx.status | (corrupted ? status::kCorrupted : 0u);
  const bool last = m.total == 0 || h.rdma.seq + 1 >= fragment_count(m.total);
  if (last) {
    const auto kind = is_error_status(st) ? EventKind::Error : EventKind::PktReceived;
    CompletionEvent e{kind, h.rdma.msg_id, st, m.first_addr, m.total, h.net.source, 0};
    if (!post(e, now)) return false;
    finish_record(st);
    msgs_.erase(it);
    return true;
  }
  m.status = st;
  m.expected_seq = h.rdma.seq + 1;
  finish_record(st);
  return true;
}

void RdmaEngine::tick_rx(RxChannel& ch, int index, Cycle now) {
  const Cycle delay = static_cast<Cycle>(p_.timing.rx_write_delay);
  const int port = (1 + index) % std::max(1, p_.master_ports);
  while (!ch.q.empty()) {
    auto& e = ch.q.front();
    if (e.arrival >= now) break;
    const Flit& f = e.flit;
    if (f.kind == FlitKind::Head) {
      ch.header.push_back(f.word);
      if (ledger_ && f.packet_uid) ++ledger_->packet(f.packet_uid).flits_delivered;
      const auto uid = f.packet_uid;
      ch.q.pop_front();
      if (ch.header.size() == kHeaderWords) {
        try {
          auto h = decode_header(std::span<const Word, kHeaderWords>(ch.header.data(), kHeaderWords));
          ch.cur = begin_packet(h, uid);
        } catch (const Error&) {
          RxPacket bad;
          bad.uid = uid;
          bad.discard = true;
          bad.status = status::kDecodeError | status::kRouteError;
          ch.cur = bad;
        }
        if (ledger_ && uid) {
          auto& r = ledger_->packet(uid);
          if (r.header != ch.header) r.envelope_intact = false;
        }
        ch.header.clear();
      }
      continue;
    }
    if (!ch.cur) {  // payload without a header: cannot happen with an intact envelope
      ch.q.pop_front();
      continue;
    }
    if (now < e.arrival + delay) break;
    auto& rx = *ch.cur;
    if (f.kind == FlitKind::Body) {
      auto target = payload_target(rx, rx.payload_seen);
      if (target && !ports_.try_use(port)) break;
      if (target) mem_.write(*target, f.word);
      rx.crc.update_word(f.word);
      account_word(rx.uid, target.has_value(), now);
      ++rx.payload_seen;
      if (ledger_ && f.packet_uid) ++ledger_->packet(f.packet_uid).flits_delivered;
      ch.q.pop_front();
      break;  // one payload word per channel per cycle
    }
    const Footer footer = decode_footer(f.word);
    if (ledger_ && rx.uid) {
      auto& r = ledger_->packet(rx.uid);
      const auto sent = r.payload_len;
      // Payload words of a packet whose header decoded badly never reach memory.
      if (rx.payload_seen < sent) r.words_discarded += sent - rx.payload_seen;
    }
    if (!end_packet(rx, footer, now)) break;
    if (ledger_ && f.packet_uid) ++ledger_->packet(f.packet_uid).flits_delivered;
    ch.cur.reset();
    ch.q.pop_front();
  }
}

bool RdmaEngine::handle_incoming_packet(const Packet& p, Cycle now) {
  if (cq_.full()) return false;
  auto rx = begin_packet(HeaderView{p.net, p.rdma}, 0);
  for (std::uint32_t i = 0; i < p.payload.size(); ++i) {
    if (auto t = payload_target(rx, i)) mem_.write(*t, p.payload[i]);
    rx.crc.update_word(p.payload[i]);
  }
  return end_packet(rx, p.footer, now);
}

// -------------------------------------------------------------------- cycle

void RdmaEngine::tick(Cycle now) {
  ports_.new_cycle();
  for (std::size_t i = 0; i < rx_.size(); ++i) tick_rx(rx_[i], static_cast<int>(i), now);

  if (act_.phase == Phase::Idle) start_job(now);
  if (act_.phase == Phase::Waiting && now >= act_.start) begin_active(now);
  if (act_.phase == Phase::Loopback) tick_loopback(now);
  if (act_.phase == Phase::Stream) tick_stream(now);
  if (act_.phase == Phase::Finish) {
    if (!act_.final_event || post(*act_.final_event, now)) {
      act_ = Active{};
    }
  }
}

}  // namespace dnp
