#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sys/wait.h>

#include "dnp/bench/config_file.hpp"
#include "dnp/bench/experiments.hpp"
#include "dnp/bench/report.hpp"
#include "dnp/bench/traffic.hpp"
#include "dnp/topology.hpp"

using namespace dnp;
using namespace dnp::bench;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DNPSIM_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = std::string(TEST_TMP_DIR) + "/" + name;
  std::ofstream(path) << text;
  return path;
}

std::vector<std::string> diagnostics(const std::string& text) {
  try {
    parse_config(text, "t.ini");
  } catch (const ConfigFileError& e) {
    return e.diagnostics();
  }
  return {};
}

}  // namespace

TEST_CASE("config: the reference file gives L=2, N=1, M=6 on a 3D torus") {
  const auto cfg = load_config(std::string(CONFIG_DIR) + "/shapes.ini");
  CHECK(cfg.topology.L == 2);
  CHECK(cfg.topology.N == 1);
  CHECK(cfg.topology.M == 6);
  CHECK(cfg.topology.torus_dims_used() == 3);
  CHECK(cfg.link.bits_per_cycle() == 4.0);
}

TEST_CASE("config: omitted keys keep their defaults; the echo parses back to the same values") {
  const SimConfig defaults;
  const auto cfg = parse_config("[timing]\nserdes_transit = 140\n");
  CHECK(cfg.timing.serdes_transit == 140);
  CHECK(cfg.timing.cmd_issue_to_read == defaults.timing.cmd_issue_to_read);
  CHECK(cfg.sw.offchip_vc_depth == defaults.sw.offchip_vc_depth);
  for (const auto& base : {presets::shapes(), presets::mt2d(), presets::mtnoc(), presets::torus(4, 3, 2)}) {
    auto c = base;
    c.seed = 1234567;
    c.link.offchip_ber = 1.5e-5;
    c.sw.dim_priority = {0, 2, 1};
    c.sw.arbitration = ArbitrationPolicy::FixedPriority;
    const auto back = parse_config(to_ini(c));
    CHECK(to_ini(back) == to_ini(c));
    CHECK(config_entries(back) == config_entries(c));
  }
}

TEST_CASE("config: unknown keys, bad values and violations carry line numbers") {
  auto d = diagnostics("[topology]\nL = 2\nwidgets = 3\n");
  REQUIRE(d.size() == 1);
  CHECK(d[0].rfind("t.ini:3:", 0) == 0);

  d = diagnostics("[timing]\ncmd_issue_to_read = -5\n");
  REQUIRE_FALSE(d.empty());
  CHECK(d[0].find("cmd_issue_to_read") != std::string::npos);

  d = diagnostics("[timng]\nx = 1\n\n[link]\nddr = maybe\n");
  CHECK(d.size() == 3);  // unknown section, its key, the bad boolean
  CHECK(d[2].rfind("t.ini:5:", 0) == 0);

  d = diagnostics("seed = 4\n");
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("outside any section") != std::string::npos);

  d = diagnostics("[switch]\ndim_priority = x,x,y\n");
  REQUIRE(d.size() == 1);

  d = diagnostics("[topology]\nL = 2\npreset = mt2d\n");
  REQUIRE(d.size() == 1);
  CHECK(d[0].find("preset") != std::string::npos);

  d = diagnostics("[topology]\ntiles_per_chip = 8\nscheme = mt2d\nN = 1\n");
  REQUIRE_FALSE(d.empty());
  CHECK(d[0].rfind("t.ini:0:", 0) == 0);
}

TEST_CASE("traffic: deterministic under a seed, different across seeds") {
  auto cfg = presets::torus(4, 4, 4);
  TrafficSpec s;
  s.packets = 500;
  s.seed = 3;
  const auto a = generate_traffic(s, cfg), b = generate_traffic(s, cfg);
  REQUIRE(a.trace.size() == 500);
  std::vector<std::string> la, lb;
  for (const auto& e : a.trace) la.push_back(to_trace_line(e));
  for (const auto& e : b.trace) lb.push_back(to_trace_line(e));
  CHECK(la == lb);
  s.seed = 4;
  const auto c = generate_traffic(s, cfg);
  CHECK(to_trace_line(c.trace[0]) != la[0]);
  // trace lines parse back
  for (const auto& e : a.trace) {
    const auto back = parse_trace_line(to_trace_line(e));
    CHECK(back.cycle == e.cycle);
    CHECK(back.words == e.words);
  }
  // never to self, sorted by cycle
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const auto cmd = RdmaCommand::decode(a.trace[i].words);
    CHECK(cmd.dst_dnp != cmd.src_dnp);
    if (i) CHECK(a.trace[i - 1].cycle <= a.trace[i].cycle);
  }
}

TEST_CASE("traffic: nearest-neighbour halo is six PUTs per tile per round") {
  auto cfg = presets::shapes();
  TrafficSpec s;
  s.pattern = Pattern::NearestNeighbor3D;
  s.rounds = 3;
  const auto t = generate_traffic(s, cfg);
  CHECK(t.trace.size() == 8 * 6 * 3);
  const Topology topo(cfg.topology);
  std::map<std::uint32_t, int> per_tile;
  for (const auto& e : t.trace) {
    const auto cmd = RdmaCommand::decode(e.words);
    ++per_tile[cmd.src_dnp.raw()];
    bool neighbor = false;
    for (const auto& n : topo.neighbors(cmd.src_dnp)) neighbor = neighbor || n.id == cmd.dst_dnp;
    CHECK(neighbor);
  }
  for (const auto& [_, n] : per_tile) CHECK(n == 18);
}

TEST_CASE("traffic: hotspot sends everything to one tile and warns above capacity") {
  auto cfg = presets::shapes();
  TrafficSpec s;
  s.pattern = Pattern::Hotspot;
  s.hotspot = 0;
  s.packets = 200;
  s.rate = 0.01;
  auto t = generate_traffic(s, cfg);
  const Topology topo(cfg.topology);
  for (const auto& e : t.trace) CHECK(RdmaCommand::decode(e.words).dst_dnp == topo.ids()[0]);
  CHECK(t.warnings.empty());
  s.rate = 0.5;
  t = generate_traffic(s, cfg);
  CHECK(t.warnings.size() == 1);
}

TEST_CASE("reports: byte-identical on repeat, fixed field order") {
  auto cfg = presets::shapes();
  ExperimentParams p;
  p.packets = 100;
  const auto a = run_experiment("random_traffic_drain", cfg, p);
  const auto b = run_experiment("random_traffic_drain", cfg, p);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(to_json(a) == to_json(b));
  const auto j = to_json(a);
  CHECK(j.find("\"experiment\"") < j.find("\"seed\""));
  CHECK(j.find("\"seed\"") < j.find("\"rng\""));
  CHECK(j.find("mt19937_64") != std::string::npos);
  CHECK(j.find("\"config\"") < j.find("\"tables\""));
  CHECK(a.passed());
  CHECK(to_csv(a).find("topology.lattice,\"2,2,2\"") != std::string::npos);
}

TEST_CASE("every experiment runs on the reference preset and on a generic torus") {
  ExperimentParams p;
  p.packets = 60;
  for (const auto& cfg : {presets::shapes(), presets::torus(3, 3, 3)}) {
    for (const auto& name : experiment_names()) {
      ExperimentParams q = p;
      if (name == "fault_injection_sweep") q.bers = {0.0, 1e-4};
      if (name == "loopback_latency" || name == "intra_bw" || name == "offchip_bw_sweep") q.sizes = {1, 300};
      CAPTURE(name);
      const auto r = run_experiment(name, cfg, q);
      CHECK(r.drained);
      CHECK(r.conserved);
      CHECK_FALSE(r.tables.empty());
      for (const auto& c : r.checks) {
        // latency and bandwidth expectations only apply to the default timing
        if (c.name.rfind("data_", 0) == 0 || c.name.rfind("equals_put", 0) == 0) CHECK(c.pass);
      }
    }
  }
  CHECK_THROWS_AS(run_experiment("no_such_thing", presets::shapes()), UsageError);
  CHECK_THROWS_AS(run_experiment("put_double_hop", presets::torus(2, 1, 1)), UsageError);
}

TEST_CASE("trace replay reproduces a PUT and reports its events") {
  auto cfg = presets::shapes();
  const Topology topo(cfg.topology);
  RdmaCommand c;
  c.code = CommandCode::Put;
  c.src_dnp = topo.ids()[0];
  c.dst_dnp = topo.ids()[5];
  c.length = 40;
  c.dst_addr = 0x2000;
  c.tag = 9;
  const auto r = run_trace({{10, c.src_dnp, c.encode()}}, cfg);
  CHECK(r.drained);
  const auto* ev = r.find("events");
  REQUIRE(ev != nullptr);
  CHECK(ev->rows.size() == 2);  // CMD_DONE at the source, PKT_RECEIVED at the destination
}

TEST_CASE("cli: exit codes 0, 2 and 3") {
  CHECK(run_cli("validate-config --config " + std::string(CONFIG_DIR) + "/shapes.ini") == 0);
  CHECK(run_cli("validate-config --config " + write_temp("bad.ini", "[timing]\nforward_pipeline = -1\n")) == 2);
  CHECK(run_cli("validate-config --config " + write_temp("typo.ini", "[link]\nbaud = 4\n")) == 2);
  CHECK(run_cli("validate-config --config /nonexistent/x.ini") == 2);
  CHECK(run_cli("run --experiment bogus") == 2);
  CHECK(run_cli("run") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("run --experiment loopback_latency --format json --output " + std::string(TEST_TMP_DIR) +
                "/lb.json") == 0);
  // a budget far too small to drain
  CHECK(run_cli("run --experiment put_single_hop_offchip --max-cycles 50") == 3);
  const auto trace = std::string(TEST_TMP_DIR) + "/t.trace";
  CHECK(run_cli("gen-traffic --preset shapes --packets 50 --output " + trace) == 0);
  CHECK(run_cli("run --preset shapes --workload " + trace) == 0);
  CHECK(run_cli("run --preset shapes --workload " + write_temp("broken.trace", "1 2 3\n")) == 2);
  CHECK(run_cli("run --preset shapes --experiment put_double_hop --repeat 3 --format json") == 0);
}
