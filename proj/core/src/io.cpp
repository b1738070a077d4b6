#include "coalsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace coalsim {

std::string format_g17(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_header_block(std::ostream& os, const FileHeader& header) {
  os << "# coalsim_version=" << kVersion << '\n';
  os << "# config=" << header.config_echo << '\n';
  os << "# seed=" << header.seed << '\n';
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

}  // namespace

void write_event_log_csv(const std::string& path, std::span<const BlockCountPath> paths,
                         const FileHeader& header) {
  auto os = open_or_throw(path);
  write_header_block(os, header);
  os << "replicate,time,count_after,blocks_lost\n";
  for (std::size_t r = 0; r < paths.size(); ++r) {
    for (const auto& e : paths[r].events) {
      os << r << ',' << format_g17(e.time) << ',' << e.count_after << ',' << e.blocks_lost
         << '\n';
    }
  }
}

void write_partition_snapshot_csv(const std::string& path,
                                  std::span<const PartitionState> states,
                                  const FileHeader& header) {
  auto os = open_or_throw(path);
  write_header_block(os, header);
  os << "replicate,t,block_size\n";
  for (std::size_t r = 0; r < states.size(); ++r) {
    for (const auto& b : states[r].blocks) {
      os << r << ',' << format_g17(states[r].time) << ',' << b.size << '\n';
    }
  }
}

void write_atom_snapshot_csv(const std::string& path,
                             std::span<const AtomSystem> systems,
                             const FileHeader& header) {
  auto os = open_or_throw(path);
  write_header_block(os, header);
  os << "replicate,grid_time,atom_id,mass\n";
  for (std::size_t r = 0; r < systems.size(); ++r) {
    for (const auto& a : systems[r].atoms) {
      os << r << ',' << format_g17(systems[r].grid_time) << ',' << a.id << ','
         << format_g17(a.mass) << '\n';
    }
  }
}

void write_time_change_csv(const std::string& path, const TimeChangePath& tc,
                           const FileHeader& header) {
  auto os = open_or_throw(path);
  write_header_block(os, header);
  os << "s,Z,R\n";
  for (std::size_t i = 0; i < tc.grid.size(); ++i) {
    os << format_g17(tc.grid[i]) << ',' << format_g17(tc.z_values[i]) << ','
       << format_g17(tc.r_values[i]) << '\n';
  }
}

}  // namespace coalsim
