#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rudn/adam.hpp"
#include "rudn/resunet.hpp"

namespace rudn {

// Binary layout: 5-byte magic "RUDN1", then a little-endian u64 with the
// byte length of a JSON manifest (config, metadata, and a parameter table
// with name / dtype / shape / byte offset), then the raw little-endian
// 32-bit float values. The manifest serializes with sorted object keys and
// shortest round-trip numbers, so save -> load -> save is byte-identical.

inline constexpr char kCheckpointMagic[5] = {'R', 'U', 'D', 'N', '1'};

struct CheckpointMeta {
  int epoch = 0;
  std::uint64_t seed = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

void save_checkpoint(const std::string& path, ResUNet<float>& model,
                     std::uint64_t extractor_seed, const CheckpointMeta& meta,
                     Adam<float>* adam = nullptr);

struct LoadedCheckpoint {
  ModelConfig cfg;
  std::uint64_t extractor_seed = 0;
  CheckpointMeta meta;
  std::unique_ptr<ResUNet<float>> model;
  bool has_adam = false;
  std::int64_t adam_t = 0;
  // moment vectors in model->params() order, empty unless has_adam
  std::vector<std::vector<float>> adam_m, adam_v;
};

// Rebuilds the model from the stored config and fills every parameter and
// running statistic, validating names and shapes. Corrupt or mismatched
// files throw data_error.
LoadedCheckpoint load_checkpoint(const std::string& path);

// Copies stored Adam moments into an optimizer built over ck.model->params().
void restore_adam(Adam<float>& adam, const LoadedCheckpoint& ck);

}  // namespace rudn
