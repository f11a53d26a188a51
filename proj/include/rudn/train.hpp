#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rudn/feature_extractor.hpp"
#include "rudn/losses.hpp"
#include "rudn/pipeline.hpp"
#include "rudn/resunet.hpp"

namespace rudn {

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 1e-4;
  double alpha = 0.8;
  int batch_size = 8;
  std::uint64_t seed = 0;
  bool keep_best_on_val = true;
  bool augment_train = true;

  ModelConfig model;
  NoiseConfig noise;
  AugmentConfig augment;

  void validate() const;  // epochs >= 1, learning_rate > 0, batch_size >= 1
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// One denoising training run. Per epoch the training records are shuffled
// and batched; each record is augmented (training only) and corrupted with
// freshly drawn noise from its own per-epoch stream, the model runs on the
// noisy batch, and the combined loss against the clean (augmented) batch is
// backpropagated into an Adam step. Validation corrupts each record with a
// fixed per-record stream so the val loss is comparable across epochs. When
// keep_best_on_val is set the model is left holding the weights of the best
// validation epoch; otherwise the final weights.
TrainResult train_model(ResUNet<float>& model,
                        FeatureExtractor<float>& extractor,
                        const std::vector<ImageRecord>& train_recs,
                        const std::vector<ImageRecord>& val_recs,
                        const TrainConfig& cfg,
                        const EpochCallback& on_epoch = {});

}  // namespace rudn
