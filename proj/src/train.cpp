#include "rudn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rudn/adam.hpp"
#include "rudn/errors.hpp"

namespace rudn {

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
  if (!(learning_rate > 0)) {
    throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  }
  if (batch_size < 1) {
    throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  }
  LossConfig{alpha}.validate();
  noise.validate();
  model.validate();
}

namespace {

struct ModelSnapshot {
  std::vector<Tensor> params;
  std::vector<Tensor> states;
};

void capture(ResUNet<float>& model, ModelSnapshot& snap) {
  snap.params.clear();
  snap.states.clear();
  for (Parameter<float>* p : model.params()) snap.params.push_back(p->value);
  for (auto& [name, t] : model.state_tensors()) snap.states.push_back(*t);
}

void restore(ResUNet<float>& model, const ModelSnapshot& snap) {
  std::size_t i = 0;
  for (Parameter<float>* p : model.params()) p->value = snap.params[i++];
  i = 0;
  for (auto& [name, t] : model.state_tensors()) *t = snap.states[i++];
}

// Packs records[idx[first..last)] into one (B, h, w, 1) clean/noisy pair.
struct Batch {
  Tensor clean;
  Tensor noisy;
};

void check_dims(const ImageRecord& rec, const ModelConfig& cfg) {
  if (rec.pixels.shape.h != cfg.input_height ||
      rec.pixels.shape.w != cfg.input_width) {
    throw data_error("train: record '" + rec.id + "' has dims " +
                     rec.pixels.shape.str() + ", model expects (1," +
                     std::to_string(cfg.input_height) + "," +
                     std::to_string(cfg.input_width) + ",1)");
  }
}

}  // namespace

TrainResult train_model(ResUNet<float>& model,
                        FeatureExtractor<float>& extractor,
                        const std::vector<ImageRecord>& train_recs,
                        const std::vector<ImageRecord>& val_recs,
                        const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_recs.empty() || val_recs.empty()) {
    throw data_error("train: train and val splits must both be nonempty");
  }
  for (const ImageRecord& r : train_recs) check_dims(r, cfg.model);
  for (const ImageRecord& r : val_recs) check_dims(r, cfg.model);

  const int h = cfg.model.input_height, w = cfg.model.input_width;
  const LossConfig loss_cfg{cfg.alpha};
  loss_cfg.validate();

  std::vector<Parameter<float>*> params = model.params();
  std::vector<Parameter<float>*> trainable;
  for (Parameter<float>* p : params) {
    if (p->trainable) trainable.push_back(p);
  }
  Adam<float> adam(trainable, AdamConfig{.lr = cfg.learning_rate});

  const Rng root(cfg.seed);
  const Rng train_root = root.stream("train");
  const Rng val_root = root.stream("val");

  TrainResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  ModelSnapshot best;

  std::vector<std::size_t> order(train_recs.size());

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const Rng epoch_root = train_root.stream(static_cast<std::uint64_t>(epoch));

    std::iota(order.begin(), order.end(), std::size_t{0});
    {
      Rng order_rng = epoch_root.stream("order");
      order_rng.shuffle(order);
    }

    double train_loss_sum = 0.0;
    std::int64_t train_count = 0;
    int batch_index = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size), ++batch_index) {
      const std::size_t stop = std::min(
          order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const int nb = static_cast<int>(stop - start);

      Batch batch{Tensor(Shape{nb, h, w, 1}), Tensor(Shape{nb, h, w, 1})};
      for (std::size_t k = start; k < stop; ++k) {
        const ImageRecord& rec = train_recs[order[k]];
        Rng rec_rng = epoch_root.stream(rec.id);
        ImageRecord clean =
            cfg.augment_train ? augment(rec, cfg.augment, rec_rng) : rec;
        auto [noisy, sigma] = add_noise(clean, cfg.noise, rec_rng);
        (void)sigma;
        const std::size_t px = static_cast<std::size_t>(h) * w;
        std::copy_n(clean.pixels.data.data(), px,
                    batch.clean.data.data() + (k - start) * px);
        std::copy_n(noisy.pixels.data.data(), px,
                    batch.noisy.data.data() + (k - start) * px);
      }

      Tensor pred = model.forward(batch.noisy, Mode::kTrain);
      Tensor grad;
      const double loss =
          combined_loss(batch.clean, pred, loss_cfg, extractor, &grad);
      if (!std::isfinite(loss)) {
        throw numeric_error("train: non-finite loss at epoch " +
                            std::to_string(epoch) + ", batch " +
                            std::to_string(batch_index));
      }
      for (Parameter<float>* p : params) p->zero_grad();
      model.backward(grad);
      adam.step();

      train_loss_sum += loss * nb;
      train_count += nb;
    }

    // validation: fixed per-record noise, no augmentation, infer mode
    double val_loss_sum = 0.0;
    std::int64_t val_count = 0;
    for (std::size_t start = 0; start < val_recs.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop = std::min(
          val_recs.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const int nb = static_cast<int>(stop - start);
      Batch batch{Tensor(Shape{nb, h, w, 1}), Tensor(Shape{nb, h, w, 1})};
      for (std::size_t k = start; k < stop; ++k) {
        const ImageRecord& rec = val_recs[k];
        Rng rec_rng = val_root.stream(rec.id);
        auto [noisy, sigma] = add_noise(rec, cfg.noise, rec_rng);
        (void)sigma;
        const std::size_t px = static_cast<std::size_t>(h) * w;
        std::copy_n(rec.pixels.data.data(), px,
                    batch.clean.data.data() + (k - start) * px);
        std::copy_n(noisy.pixels.data.data(), px,
                    batch.noisy.data.data() + (k - start) * px);
      }
      Tensor pred = model.forward(batch.noisy, Mode::kInfer);
      const double loss = combined_loss(batch.clean, pred, loss_cfg, extractor);
      if (!std::isfinite(loss)) {
        throw numeric_error("train: non-finite validation loss at epoch " +
                            std::to_string(epoch));
      }
      val_loss_sum += loss * nb;
      val_count += nb;
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = train_loss_sum / static_cast<double>(train_count);
    entry.val_loss = val_loss_sum / static_cast<double>(val_count);
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (entry.val_loss < result.best_val_loss) {
      result.best_val_loss = entry.val_loss;
      result.best_epoch = epoch;
      if (cfg.keep_best_on_val) capture(model, best);
    }
  }

  if (cfg.keep_best_on_val && !best.params.empty()) {
    restore(model, best);
  }
  return result;
}

}  // namespace rudn
