#pragma once
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "beskar/agg/protocol.hpp"
#include "beskar/common/op_counts.hpp"

namespace beskar::sim {

// One (round, entity, phase) measurement. Round 0 is setup.
struct metric_row
{
  uint64_t round = 0;
  agg::entity_kind kind = agg::entity_kind::client;
  uint32_t id = 0;
  std::string phase;
  double compute_us = 0; // per the configured timing mode
  uint64_t bytes_out = 0;
  uint64_t sign_restarts = 0;
  std::string outcome;
  // Not exported: both timings and the primitive tally behind them.
  double measured_us = 0;
  double model_us = 0;
  op_counts ops;
};

// One message on the wire.
struct trace_line
{
  uint64_t round = 0;
  std::string from;
  std::string to;
  std::string phase;
  size_t bytes = 0;
  double time_us = 0;
};

inline std::string
entity_label(agg::entity_kind kind, uint32_t id)
{
  if (kind == agg::entity_kind::server) {
    return "server";
  }
  return std::string(agg::to_string(kind)) + "-" + std::to_string(id);
}

inline constexpr const char* METRICS_HEADER =
  "round,entity_kind,entity_id,phase,compute_us,bytes_out,sign_restarts,outcome";

inline void
write_metrics(std::ostream& out, const std::vector<metric_row>& rows)
{
  out << METRICS_HEADER << '\n';
  char us[64];
  for (const auto& r : rows) {
    std::snprintf(us, sizeof us, "%.3f", r.compute_us);
    out << r.round << ',' << agg::to_string(r.kind) << ',' << r.id << ',' << r.phase << ',' << us << ','
        << r.bytes_out << ',' << r.sign_restarts << ',' << r.outcome << '\n';
  }
}

// Writes the CSV; on failure returns false with a reason and leaves the
// rows untouched.
inline bool
export_metrics(const std::vector<metric_row>& rows, const std::string& path, std::string* error = nullptr)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    if (error) {
      *error = "cannot open " + path + " for writing";
    }
    return false;
  }
  write_metrics(out, rows);
  out.flush();
  if (!out) {
    if (error) {
      *error = "write to " + path + " failed";
    }
    return false;
  }
  return true;
}

// round from to phase bytes time_us, space separated.
inline void
write_trace(std::ostream& out, const std::vector<trace_line>& lines)
{
  char us[64];
  for (const auto& l : lines) {
    std::snprintf(us, sizeof us, "%.3f", l.time_us);
    out << l.round << ' ' << l.from << ' ' << l.to << ' ' << l.phase << ' ' << l.bytes << ' ' << us << '\n';
  }
}

}
