#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "fixgraph/gat.hpp"

namespace fixgraph {

struct CheckpointInfo {
  std::uint64_t seed = 0;
  int epoch = 0;
  /// Snapshot of training metrics at the saved epoch (e.g. loss, f1, val_loss).
  std::map<std::string, double> metrics;
};

struct Checkpoint {
  GatModel model;
  CheckpointInfo info;
};

/// "PSGAT1\n", a one-line JSON header {format, config, seed, epoch, metrics,
/// parameter_count}, then the parameters in GatModel::flatten() order as
/// little-endian float64.
void save_checkpoint(std::ostream& os, const GatModel& model, const CheckpointInfo& info);
void save_checkpoint_file(const std::string& path, const GatModel& model, const CheckpointInfo& info);

/// Throws VersionMismatch on a foreign magic or an inconsistent header.
Checkpoint load_checkpoint(std::istream& is);
Checkpoint load_checkpoint_file(const std::string& path);

}  // namespace fixgraph
