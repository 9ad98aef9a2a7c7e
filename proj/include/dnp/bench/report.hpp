#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dnp::bench {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

// A declared expectation: value must lie in [lo, hi].
struct Check {
  std::string name;
  double value = 0;
  double lo = 0;
  double hi = 0;
  bool pass = false;
};

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string rng = "mt19937_64";
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<Table> tables;
  std::vector<Check> checks;
  std::vector<std::string> warnings;
  bool drained = true;
  bool conserved = true;

  Table& table(const std::string& name, std::vector<std::string> columns);
  const Table* find(const std::string& name) const;
  const Check* check(const std::string& name) const;
  void expect(const std::string& name, double value, double lo, double hi);
  void expect_true(const std::string& name, bool ok) { expect(name, ok ? 1 : 0, 1, 1); }
  bool passed() const;
};

std::string fmt(double v, int precision = 3);

// CSV: one block per table preceded by "# name", then checks and metadata.
std::string to_csv(const Report& r);
// JSON object with fixed key order.
std::string to_json(const Report& r);
std::string to_json(const std::vector<Report>& rs);

}  // namespace dnp::bench
