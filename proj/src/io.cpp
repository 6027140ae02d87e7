#include "bbmabs/io.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace bbmabs::io {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

nlohmann::json spec_json(const SpecEcho& spec) {
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : spec) meta[k] = v;
  return meta;
}

nlohmann::json outcome_json(const engine::Outcome& out) {
  nlohmann::json j;
  j["extinct"] = out.extinct;
  if (out.extinct)
    j["zeta"] = out.zeta;
  else
    j["zeta"] = nullptr;
  auto hits = nlohmann::json::array();
  for (const auto& h : out.hits) hits.push_back(h.time);
  j["hits"] = std::move(hits);
  auto cps = nlohmann::json::array();
  for (const auto& cp : out.checkpoints)
    cps.push_back({{"s", cp.s}, {"n", cp.n}, {"z", cp.z}});
  j["checkpoints"] = std::move(cps);
  j["truncated"] = out.truncated;
  j["max_live"] = out.max_live;
  return j;
}

}  // namespace

void write_outcomes_jsonl(std::ostream& os, const SpecEcho& spec,
                          std::span<const engine::Outcome> outcomes) {
  os << nlohmann::json{{"meta", spec_json(spec)}}.dump() << '\n';
  for (const auto& out : outcomes) os << outcome_json(out).dump() << '\n';
}

void write_checkpoints_csv(std::ostream& os, const SpecEcho& spec,
                           std::span<const engine::Outcome> outcomes) {
  for (const auto& [k, v] : spec) os << "# " << k << " = " << v << '\n';
  os << "replicate,s,n,z\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    for (const auto& cp : outcomes[i].checkpoints)
      os << i << ',' << fmt(cp.s) << ',' << cp.n << ',' << fmt(cp.z) << '\n';
}

void write_table_csv(std::ostream& os, const SpecEcho& spec, const Table& table) {
  for (const auto& [k, v] : spec) os << "# " << k << " = " << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
}

void write_table_jsonl(std::ostream& os, const SpecEcho& spec, const Table& table) {
  os << nlohmann::json{{"meta", spec_json(spec)}}.dump() << '\n';
  for (const auto& row : table.rows) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size() && c < table.columns.size(); ++c)
      j[table.columns[c]] = row[c];
    os << j.dump() << '\n';
  }
}

}  // namespace bbmabs::io
