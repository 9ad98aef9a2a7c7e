#include "dnp/bench/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace dnp::bench {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : v) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

long long to_int(const std::string& v) {
  long long x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
  return x;
}

int to_int32(const std::string& v) {
  const auto x = to_int(v);
  if (x < -(1ll << 31) || x >= (1ll << 31)) throw ConfigError("integer out of range: " + v);
  return static_cast<int>(x);
}

std::uint32_t to_u32(const std::string& v) {
  const auto x = to_int(v);
  if (x < 0 || x > 0xFFFFFFFFll) throw ConfigError("expected a non-negative 32-bit integer, got '" + v + "'");
  return static_cast<std::uint32_t>(x);
}

double to_double(const std::string& v) {
  double x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("expected a number, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::string fmt_double(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

int dim_from(const std::string& s) {
  if (s == "x" || s == "X" || s == "0") return 0;
  if (s == "y" || s == "Y" || s == "1") return 1;
  if (s == "z" || s == "Z" || s == "2") return 2;
  throw ConfigError("unknown dimension '" + s + "'");
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

#define DNP_INT_KEY(sec, name, field)                                                  \
  Key {                                                                                \
    sec, name, [](SimConfig& c, const std::string& v) { c.field = to_int32(v); },      \
        [](const SimConfig& c) { return std::to_string(c.field); }                     \
  }
#define DNP_DOUBLE_KEY(sec, name, field)                                               \
  Key {                                                                                \
    sec, name, [](SimConfig& c, const std::string& v) { c.field = to_double(v); },     \
        [](const SimConfig& c) { return fmt_double(c.field); }                         \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      {"topology", "lattice",
       [](SimConfig& c, const std::string& v) {
         const auto parts = split_list(v);
         if (parts.size() != 3) throw ConfigError("lattice needs three sizes, e.g. 2,2,2");
         for (std::size_t i = 0; i < 3; ++i) c.topology.lattice[i] = to_int32(parts[i]);
       },
       [](const SimConfig& c) {
         const auto& l = c.topology.lattice;
         return std::to_string(l[0]) + "," + std::to_string(l[1]) + "," + std::to_string(l[2]);
       }},
      DNP_INT_KEY("topology", "tiles_per_chip", topology.tiles_per_chip),
      {"topology", "scheme",
       [](SimConfig& c, const std::string& v) {
         if (v == "none") c.topology.scheme = OnChipScheme::None;
         else if (v == "mtnoc") c.topology.scheme = OnChipScheme::MTNoC;
         else if (v == "mt2d") c.topology.scheme = OnChipScheme::MT2D;
         else throw ConfigError("scheme must be none, mtnoc or mt2d");
       },
       [](const SimConfig& c) { return std::string(to_string(c.topology.scheme)); }},
      DNP_INT_KEY("topology", "mesh_width", topology.mesh_width),
      DNP_INT_KEY("topology", "L", topology.L),
      DNP_INT_KEY("topology", "N", topology.N),
      DNP_INT_KEY("topology", "M", topology.M),
      DNP_INT_KEY("timing", "cmd_issue_to_read", timing.cmd_issue_to_read),
      DNP_INT_KEY("timing", "switch_inject", timing.switch_inject),
      DNP_INT_KEY("timing", "serdes_transit", timing.serdes_transit),
      DNP_INT_KEY("timing", "deliver_to_write", timing.deliver_to_write),
      DNP_INT_KEY("timing", "loopback_turnaround", timing.loopback_turnaround),
      DNP_INT_KEY("timing", "forward_pipeline", timing.forward_pipeline),
      DNP_INT_KEY("timing", "onchip_link_latency", timing.onchip_link_latency),
      DNP_INT_KEY("timing", "noc_latency", timing.noc_latency),
      DNP_DOUBLE_KEY("timing", "clock_mhz", timing.clock_mhz),
      DNP_INT_KEY("switch", "onchip_vc_depth", sw.onchip_vc_depth),
      DNP_INT_KEY("switch", "offchip_vc_depth", sw.offchip_vc_depth),
      DNP_INT_KEY("switch", "intra_vc_depth", sw.intra_vc_depth),
      DNP_INT_KEY("switch", "offchip_vcs", sw.offchip_vcs),
      {"switch", "arbitration",
       [](SimConfig& c, const std::string& v) {
         if (v == "round_robin") c.sw.arbitration = ArbitrationPolicy::RoundRobin;
         else if (v == "fixed_priority") c.sw.arbitration = ArbitrationPolicy::FixedPriority;
         else throw ConfigError("arbitration must be round_robin or fixed_priority");
       },
       [](const SimConfig& c) { return std::string(to_string(c.sw.arbitration)); }},
      {"switch", "dim_priority",
       [](SimConfig& c, const std::string& v) {
         const auto parts = split_list(v);
         if (parts.size() != 3) throw ConfigError("dim_priority needs three dimensions, e.g. z,y,x");
         std::array<int, 3> p{};
         for (std::size_t i = 0; i < 3; ++i) p[i] = dim_from(parts[i]);
         if (p[0] == p[1] || p[0] == p[2] || p[1] == p[2]) throw ConfigError("dim_priority must name x, y, z once each");
         c.sw.dim_priority = p;
       },
       [](const SimConfig& c) {
         const char* n = "xyz";
         std::string s;
         for (int d : c.sw.dim_priority) {
           if (!s.empty()) s += ",";
           s += n[d];
         }
         return s;
       }},
      {"switch", "timeout_cycles", [](SimConfig& c, const std::string& v) { c.sw.timeout_cycles = to_u32(v); },
       [](const SimConfig& c) { return std::to_string(c.sw.timeout_cycles); }},
      DNP_INT_KEY("link", "serialization_factor", link.serialization_factor),
      {"link", "ddr", [](SimConfig& c, const std::string& v) { c.link.ddr = to_bool(v); },
       [](const SimConfig& c) { return std::string(c.link.ddr ? "true" : "false"); }},
      DNP_INT_KEY("link", "retry_limit", link.retry_limit),
      DNP_DOUBLE_KEY("link", "offchip_ber", link.offchip_ber),
      DNP_DOUBLE_KEY("link", "onchip_ber", link.onchip_ber),
      DNP_INT_KEY("rdma", "cmd_fifo_depth", rdma.cmd_fifo_depth),
      DNP_INT_KEY("rdma", "cq_depth", rdma.cq_depth),
      DNP_INT_KEY("rdma", "lut_entries", rdma.lut_entries),
      {"rdma", "memory_words", [](SimConfig& c, const std::string& v) { c.rdma.memory_words = to_u32(v); },
       [](const SimConfig& c) { return std::to_string(c.rdma.memory_words); }},
      {"sim", "seed",
       [](SimConfig& c, const std::string& v) {
         const auto x = to_int(v);
         if (x < 0) throw ConfigError("seed must be non-negative");
         c.seed = static_cast<std::uint64_t>(x);
       },
       [](const SimConfig& c) { return std::to_string(c.seed); }},
  };
  return k;
}

#undef DNP_INT_KEY
#undef DNP_DOUBLE_KEY

SimConfig preset(const std::string& name) {
  if (name == "shapes") return presets::shapes();
  if (name == "mtnoc") return presets::mtnoc();
  if (name == "mt2d") return presets::mt2d();
  if (name == "torus") return presets::torus(2, 2, 2);
  throw ConfigError("unknown preset '" + name + "' (shapes, mtnoc, mt2d, torus)");
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += "\n";
    s += x;
  }
  return s;
}

}  // namespace

ConfigFileError::ConfigFileError(std::vector<std::string> diagnostics)
    : ConfigError(join(diagnostics)), diagnostics_(std::move(diagnostics)) {}

SimConfig parse_config(std::string_view text, std::string_view origin) {
  SimConfig cfg;
  std::vector<std::string> errors;
  auto err = [&](int line, const std::string& msg) {
    errors.push_back(std::string(origin) + ":" + std::to_string(line) + ": " + msg);
  };
  std::string section;
  bool any_key = false;
  std::vector<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = trim(std::string_view(raw).substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        err(line, "malformed section header");
        continue;
      }
      section = trim(std::string_view(s).substr(1, s.size() - 2));
      bool known = false;
      for (const auto& k : keys()) known = known || section == k.section;
      if (!known) err(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      err(line, "expected key = value");
      continue;
    }
    const std::string key = trim(std::string_view(s).substr(0, eq));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (section.empty()) {
      err(line, "key '" + key + "' outside any section");
      continue;
    }
    const std::string full = section + "." + key;
    if (std::find(seen.begin(), seen.end(), full) != seen.end()) {
      err(line, "duplicate key " + full);
      continue;
    }
    seen.push_back(full);
    try {
      if (section == "topology" && key == "preset") {
        if (any_key) throw ConfigError("preset must come before every other key");
        const auto seed = cfg.seed;
        cfg = preset(value);
        cfg.seed = seed;
        continue;
      }
      const Key* match = nullptr;
      for (const auto& k : keys()) {
        if (section == k.section && key == k.name) match = &k;
      }
      if (!match) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      match->set(cfg, value);
      any_key = true;
    } catch (const ConfigError& e) {
      err(line, e.what());
    }
  }
  if (errors.empty()) {
    for (const auto& v : cfg.violations()) errors.push_back(std::string(origin) + ":0: " + v);
  }
  if (!errors.empty()) throw ConfigFileError(std::move(errors));
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigFileError({path + ":0: cannot open file"});
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(std::string(k.section) + "." + k.name, k.get(cfg));
  return out;
}

std::string to_ini(const SimConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      if (!section.empty()) os << "\n";
      section = k.section;
      os << "[" << section << "]\n";
    }
    os << k.name << " = " << k.get(cfg) << "\n";
  }
  return os.str();
}

}  // namespace dnp::bench
