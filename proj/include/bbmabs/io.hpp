#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bbmabs/engine.hpp"

namespace bbmabs::io {

// Fixed-width round-trip formatting so repeated runs produce byte-identical
// files.
std::string fmt(double v);
std::string fmt(std::uint64_t v);

// (key, value) pairs describing the resolved experiment; echoed into every
// output file header.
using SpecEcho = std::vector<std::pair<std::string, std::string>>;

// One JSON object per replicate: extinct, zeta, hit times, checkpoints,
// truncated flag.  A meta object with the resolved spec is written first.
void write_outcomes_jsonl(std::ostream& os, const SpecEcho& spec,
                          std::span<const engine::Outcome> outcomes);

// Checkpoint table, CSV header `replicate,s,n,z`.
void write_checkpoints_csv(std::ostream& os, const SpecEcho& spec,
                           std::span<const engine::Outcome> outcomes);

// Generic result table.  CSV carries `# key = value` comment lines then a
// header; JSONL carries a meta line then one object per row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

void write_table_csv(std::ostream& os, const SpecEcho& spec, const Table& table);
void write_table_jsonl(std::ostream& os, const SpecEcho& spec, const Table& table);

}  // namespace bbmabs::io
