#include "dnp/bench/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace dnp::bench {

namespace {

using ordered = nlohmann::ordered_json;

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void csv_row(std::ostringstream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_cell(cells[i]);
  os << "\n";
}

ordered report_json(const Report& r) {
  ordered j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  j["rng"] = r.rng;
  j["drained"] = r.drained;
  j["conserved"] = r.conserved;
  j["passed"] = r.passed();
  ordered cfg = ordered::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["config"] = cfg;
  ordered tables = ordered::array();
  for (const auto& t : r.tables) {
    ordered jt;
    jt["name"] = t.name;
    jt["columns"] = t.columns;
    jt["rows"] = t.rows;
    tables.push_back(jt);
  }
  j["tables"] = tables;
  ordered checks = ordered::array();
  for (const auto& c : r.checks) {
    checks.push_back(ordered{{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"hi", c.hi}, {"pass", c.pass}});
  }
  j["checks"] = checks;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace

Table& Report::table(const std::string& name, std::vector<std::string> columns) {
  tables.push_back({name, std::move(columns), {}});
  return tables.back();
}

const Table* Report::find(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Check* Report::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

void Report::expect(const std::string& name, double value, double lo, double hi) {
  checks.push_back({name, value, lo, hi, value >= lo && value <= hi});
}

bool Report::passed() const {
  if (!drained || !conserved) return false;
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::string fmt(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string to_csv(const Report& r) {
  std::ostringstream os;
  os << "# experiment\nexperiment,seed,rng,drained,conserved,passed\n";
  csv_row(os, {r.experiment, std::to_string(r.seed), r.rng, r.drained ? "true" : "false",
               r.conserved ? "true" : "false", r.passed() ? "true" : "false"});
  for (const auto& t : r.tables) {
    os << "\n# " << t.name << "\n";
    csv_row(os, t.columns);
    for (const auto& row : t.rows) csv_row(os, row);
  }
  os << "\n# checks\nname,value,lo,hi,pass\n";
  for (const auto& c : r.checks) {
    csv_row(os, {c.name, fmt(c.value, 6), fmt(c.lo, 6), fmt(c.hi, 6), c.pass ? "true" : "false"});
  }
  if (!r.warnings.empty()) {
    os << "\n# warnings\nmessage\n";
    for (const auto& w : r.warnings) csv_row(os, {w});
  }
  os << "\n# config\nkey,value\n";
  for (const auto& [k, v] : r.config) csv_row(os, {k, v});
  return os.str();
}

std::string to_json(const Report& r) { return report_json(r).dump(2) + "\n"; }

std::string to_json(const std::vector<Report>& rs) {
  ordered a = ordered::array();
  for (const auto& r : rs) a.push_back(report_json(r));
  return a.dump(2) + "\n";
}

}  // namespace dnp::bench
