#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>

#include "coalsim/coalescent.hpp"
#include "coalsim/csbp.hpp"

namespace coalsim {

inline constexpr const char* kVersion = "0.1.0";

// 17 significant digits; round-trips doubles exactly
std::string format_g17(double value);

// Leading comment block carried by every output file: version, the command or
// config that produced it, and the seed.
struct FileHeader {
  std::string config_echo;
  std::uint64_t seed = 0;
};

void write_header_block(std::ostream& os, const FileHeader& header);

// columns: replicate,time,count_after,blocks_lost
void write_event_log_csv(const std::string& path, std::span<const BlockCountPath> paths,
                         const FileHeader& header);

// columns: replicate,t,block_size (one row per block)
void write_partition_snapshot_csv(const std::string& path,
                                  std::span<const PartitionState> states,
                                  const FileHeader& header);

// columns: replicate,grid_time,atom_id,mass
void write_atom_snapshot_csv(const std::string& path,
                             std::span<const AtomSystem> systems,
                             const FileHeader& header);

// columns: s,Z,R
void write_time_change_csv(const std::string& path, const TimeChangePath& tc,
                           const FileHeader& header);

}  // namespace coalsim
