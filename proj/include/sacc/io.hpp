#ifndef SACC_IO_HPP
#define SACC_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sacc/arch.hpp"
#include "sacc/cost.hpp"
#include "sacc/engine.hpp"
#include "sacc/tensor.hpp"

namespace sacc {

// Binary tensor container (little-endian):
//   "SACC" | version u32 = 1 | channels u32 | rows u32 | cols u32 |
//   channels*rows*cols int16 payload, channel-major.
// Filter containers use magic "SACF":
//   "SACF" | version u32 = 1 | m u32 | ic u32 | fh u32 | fl u32 |
//   m*ic*fh*fl int16 weights (filter-major) | m int32 biases.
// Loaders throw FormatError on bad magic/version/truncation and IoError on
// filesystem failures; error messages name the offending path.
void save_tensor(const std::string& path, const Tensor& t);
Tensor load_tensor(const std::string& path);
void save_filters(const std::string& path, const FilterSet& f);
FilterSet load_filters(const std::string& path);

// JSON configs.
ArchConfig load_arch(const std::string& path);
void save_arch(const std::string& path, const ArchConfig& a);
NetworkSpec load_network(const std::string& path);
void save_network(const std::string& path, const NetworkSpec& net);

enum class ReportFormat { Csv, Json };
ReportFormat report_format_from_name(const std::string& name);  // throws FormatError

// Per-layer cost table plus a "total" row.  Columns, in order: layer,
// cycles, latency_ms, weights_bytes, inputs_bytes, outputs_bytes,
// total_bytes, nominal_macs, gops, utilization.
std::string render_report(const NetworkCost& cost, ReportFormat fmt);

// Per-transfer DRAM log as CSV (cycle, category, group, tile, channel,
// filter_row, words).  Throws LoggingDisabled when the trace kept no log.
std::string render_trace(const DramTrace& trace);

void write_text_file(const std::string& path, const std::string& body);
std::string read_text_file(const std::string& path);

}  // namespace sacc

#endif
