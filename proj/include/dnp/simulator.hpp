#pragma once

#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "dnp/config.hpp"
#include "dnp/link.hpp"
#include "dnp/memory.hpp"
#include "dnp/rdma.hpp"
#include "dnp/rdma_engine.hpp"
#include "dnp/stats.hpp"
#include "dnp/switch.hpp"
#include "dnp/topology.hpp"

namespace dnp {

// Stage offsets derived from the configured latencies.
struct Calibration {
  EngineTiming engine;
  Switch::Timing sw;
  int serdes_pipeline = 71;
  int word_cycles = 8;
};
Calibration calibrate(const SimConfig& cfg);

struct DrainResult {
  bool drained = false;
  bool stalled = false;  // no movement for longer than the switch timeout
  Cycle cycles = 0;      // cycles simulated by this call
  std::size_t flits_in_fabric = 0;
  std::size_t pending_commands = 0;
  std::string inventory;  // human-readable list of what is still in flight
};

class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  const SimConfig& config() const { return cfg_; }
  const Topology& topology() const { return topo_; }
  const Calibration& calibration() const { return cal_; }
  Cycle now() const { return now_; }
  std::size_t tile_count() const { return tiles_.size(); }
  DnpId id_at(std::size_t i) const { return topo_.ids()[i]; }

  TileMemory& memory(DnpId id) { return *tile(id).mem; }
  RdmaEngine& engine(DnpId id) { return *tile(id).eng; }
  Switch& switch_of(DnpId id) { return *tile(id).sw; }
  StatsLedger& ledger() { return ledger_; }
  const StatsLedger& ledger() const { return ledger_; }

  // Host side. Scheduled commands enter the CMD FIFO at or after `at`,
  // in schedule order per tile, as soon as the FIFO has room.
  void schedule(DnpId tile, const CommandWords& w, Cycle at);
  void schedule(DnpId tile, const RdmaCommand& c, Cycle at) { schedule(tile, c.encode(), at); }
  void schedule(const TraceEntry& e) { schedule(e.tile, e.words, e.cycle); }
  void register_buffer(DnpId tile, std::size_t slot, const LutEntry& e) { engine(tile).lut().set(slot, e); }
  // Completion events are popped each cycle into the ledger unless disabled.
  void set_auto_pop(bool on) { auto_pop_ = on; }

  // Register write through the tile's slave port. A dimension priority
  // change is refused while any packet is in the fabric.
  bool write_register(DnpId tile, std::uint32_t addr, Word value);
  Word read_register(DnpId tile, std::uint32_t addr) { return switch_of(tile).regs().read(addr); }

  void step();
  void run_for(Cycle n);
  DrainResult run_until_drain(Cycle max_cycles);
  bool quiescent() const;
  bool fabric_empty() const;

  OffChipLink* offchip_link(DnpId from, Dir d);
  OnChipLink* mesh_link(DnpId from, int slot);
  Noc* noc_of(DnpId tile);
  std::vector<LinkStats> link_stats() const;
  const std::vector<std::unique_ptr<OffChipLink>>& offchip_links() const { return offchip_; }

 private:
  struct Tile {
    DnpId id;
    std::unique_ptr<TileMemory> mem;
    std::unique_ptr<RdmaEngine> eng;
    std::unique_ptr<Switch> sw;
    std::deque<std::pair<Cycle, CommandWords>> host;
  };
  Tile& tile(DnpId id) { return tiles_[topo_.index_of(id)]; }
  std::uint64_t progress() const;
  std::string inventory() const;

  SimConfig cfg_;
  Topology topo_;
  Calibration cal_;
  StatsLedger ledger_;
  std::vector<Tile> tiles_;
  std::vector<std::unique_ptr<OffChipLink>> offchip_;
  std::vector<std::unique_ptr<OnChipLink>> mesh_;
  std::vector<std::unique_ptr<Noc>> nocs_;
  Cycle now_ = 0;
  bool auto_pop_ = true;
};

}  // namespace dnp
