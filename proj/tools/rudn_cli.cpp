#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rudn/checkpoint.hpp"
#include "rudn/dataset.hpp"
#include "rudn/errors.hpp"
#include "rudn/evaluate.hpp"
#include "rudn/metrics.hpp"
#include "rudn/phantom.hpp"
#include "rudn/pipeline.hpp"
#include "rudn/report.hpp"
#include "rudn/train.hpp"

namespace fs = std::filesystem;
using namespace rudn;

namespace {

std::string padded_index(int i, int width = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d", width, i);
  return buf;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string family;
  int count = 0;
  std::string out_dir;
  std::uint64_t seed = 0;
  int height = 200;
  int width = 400;
  double speckle = 0.0;
};

void run_synth(const SynthArgs& a) {
  PhantomConfig cfg;
  cfg.family = parse_source(a.family);
  cfg.height = a.height;
  cfg.width = a.width;
  cfg.speckle = a.speckle;
  cfg.validate();

  fs::create_directories(a.out_dir);
  const Rng root = Rng(a.seed).stream("synth");

  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(a.count));
  for (int i = 0; i < a.count; ++i) {
    ids.push_back(a.family + "_" + padded_index(i));
  }
  for (const std::string& id : ids) {
    Rng rng = root.stream(id);
    ImageRecord rec = generate_phantom(cfg, rng);
    rec.id = id;
    save_gray8(rec.pixels, (fs::path(a.out_dir) / (id + ".pgm")).string());
  }

  Rng split_rng = Rng(a.seed).stream("split");
  DatasetSplit split = split_dataset(ids, kDefaultFractions, split_rng);

  std::vector<ManifestEntry> entries;
  for (const std::string& id : ids) {
    ManifestEntry e;
    e.id = id;
    e.relative_path = id + ".pgm";
    e.source = cfg.family;
    if (std::find(split.val.begin(), split.val.end(), id) != split.val.end()) {
      e.split = SplitName::kVal;
    } else if (std::find(split.test.begin(), split.test.end(), id) !=
               split.test.end()) {
      e.split = SplitName::kTest;
    } else {
      e.split = SplitName::kTrain;
    }
    entries.push_back(std::move(e));
  }
  const std::string manifest = (fs::path(a.out_dir) / "manifest.tsv").string();
  save_manifest(entries, manifest);
  std::printf("wrote %d %s phantoms (%dx%d) and %s\n", a.count,
              a.family.c_str(), a.height, a.width, manifest.c_str());
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string out_ckpt;
  int epochs = 300;
  double lr = 1e-4;
  double alpha = 0.8;
  int batch = 8;
  std::uint64_t seed = 0;
  int depth = 3;
  std::vector<int> channels;
  int height = 200;
  int width = 400;
};

std::vector<ImageRecord> load_split(const std::vector<ManifestEntry>& entries,
                                    const fs::path& base, SplitName which,
                                    int h, int w) {
  std::vector<ImageRecord> out;
  for (const ManifestEntry& e : entries) {
    if (e.split != which) continue;
    ImageRecord rec = load_image((base / e.relative_path).string());
    rec.id = e.id;
    rec.source = e.source;
    out.push_back(preprocess(rec, h, w));
  }
  return out;
}

void run_train(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.learning_rate = a.lr;
  cfg.alpha = a.alpha;
  cfg.batch_size = a.batch;
  cfg.seed = a.seed;
  cfg.model.input_height = a.height;
  cfg.model.input_width = a.width;
  cfg.model.depth = a.depth;
  if (!a.channels.empty()) {
    cfg.model.channels = a.channels;
  } else {
    cfg.model.channels.clear();
    for (int i = 0; i < a.depth; ++i) cfg.model.channels.push_back(32 << i);
  }
  cfg.model.bottleneck_channels = 2 * cfg.model.channels.back();
  cfg.model.seed = a.seed;
  cfg.validate();

  const std::vector<ManifestEntry> entries = load_manifest(a.manifest);
  const fs::path base = fs::path(a.manifest).parent_path();
  const std::vector<ImageRecord> train_recs =
      load_split(entries, base, SplitName::kTrain, a.height, a.width);
  const std::vector<ImageRecord> val_recs =
      load_split(entries, base, SplitName::kVal, a.height, a.width);
  std::printf("training on %zu records, validating on %zu\n",
              train_recs.size(), val_recs.size());

  ResUNet<float> model(cfg.model);
  FeatureExtractor<float> extractor;
  TrainResult result = train_model(
      model, extractor, train_recs, val_recs, cfg, [](const EpochLog& log) {
        std::printf("epoch %d  train_loss %.6f  val_loss %.6f\n", log.epoch,
                    log.train_loss, log.val_loss);
        std::fflush(stdout);
      });

  CheckpointMeta meta;
  meta.epoch = result.best_epoch;
  meta.seed = a.seed;
  meta.val_loss = result.best_val_loss;
  for (const EpochLog& log : result.log) {
    if (log.epoch == result.best_epoch) meta.train_loss = log.train_loss;
  }
  save_checkpoint(a.out_ckpt, model, extractor.config().seed, meta);
  std::printf("saved %s (best epoch %d, val_loss %.6f)\n", a.out_ckpt.c_str(),
              result.best_epoch, result.best_val_loss);
}

// --- denoise ---------------------------------------------------------------

struct DenoiseArgs {
  std::string ckpt;
  std::string in_path;
  std::string out_path;
  std::string reference;
};

void run_denoise(const DenoiseArgs& a) {
  LoadedCheckpoint ck = load_checkpoint(a.ckpt);
  const int h = ck.cfg.input_height, w = ck.cfg.input_width;
  ImageRecord input = preprocess(load_image(a.in_path), h, w);
  Tensor denoised = ck.model->forward(input.pixels, Mode::kInfer);
  save_gray8(denoised, a.out_path);
  std::printf("wrote %s (%dx%d)\n", a.out_path.c_str(), w, h);

  if (!a.reference.empty()) {
    ImageRecord ref = preprocess(load_image(a.reference), h, w);
    std::printf("psnr_paper_input %.6f\n", psnr_paper(ref.pixels, input.pixels));
    std::printf("psnr_standard_input %.6f\n",
                psnr_standard(ref.pixels, input.pixels));
    std::printf("psnr_paper_output %.6f\n", psnr_paper(ref.pixels, denoised));
    std::printf("psnr_standard_output %.6f\n",
                psnr_standard(ref.pixels, denoised));
  }
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string ckpt;
  std::string manifest;
  std::string split;
  std::string out_path;
  std::uint64_t seed = 0;
};

void run_eval(const EvalArgs& a) {
  LoadedCheckpoint ck = load_checkpoint(a.ckpt);
  const std::vector<ManifestEntry> entries = load_manifest(a.manifest);
  const fs::path base = fs::path(a.manifest).parent_path();
  const std::vector<ImageRecord> records =
      load_split(entries, base, parse_split(a.split), ck.cfg.input_height,
                 ck.cfg.input_width);
  if (records.empty()) {
    throw data_error(a.manifest + ": no records in split '" + a.split + "'");
  }
  NoiseConfig noise;
  MetricsReport report = evaluate_model(*ck.model, records, noise, a.seed);
  write_metrics_csv(report, a.out_path);
  std::printf("evaluated %zu records -> %s\n", report.rows.size(),
              a.out_path.c_str());
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::string in_path;
  std::string out_path;
  std::string format;
};

void run_report(const ReportArgs& a) {
  MetricsReport metrics = read_metrics_csv(a.in_path);
  write_report(metrics, a.out_path, a.format);
  std::printf("wrote %s report to %s\n", a.format.c_str(), a.out_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual U-Net denoiser for OCT-like grayscale images"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate synthetic phantom images");
  synth_cmd->add_option("--family", synth.family, "Phantom family")
      ->required()
      ->check(CLI::IsMember({"posterior", "anterior"}));
  synth_cmd->add_option("--count", synth.count, "Number of images")
      ->required()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->required();
  synth_cmd->add_option("--height", synth.height, "Image height")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--width", synth.width, "Image width")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--speckle", synth.speckle,
                        "Multiplicative speckle strength");
  synth_cmd->callback([&synth] { run_synth(synth); });

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a denoising model");
  train_cmd->add_option("--manifest", train.manifest, "Dataset manifest")
      ->required();
  train_cmd->add_option("--out", train.out_ckpt, "Output checkpoint")
      ->required();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs");
  train_cmd->add_option("--lr", train.lr, "Learning rate");
  train_cmd->add_option("--alpha", train.alpha, "Perceptual loss weight");
  train_cmd->add_option("--batch", train.batch, "Batch size");
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--depth", train.depth, "Encoder depth");
  train_cmd->add_option("--channels", train.channels,
                        "Encoder channels, e.g. 32,64,128")
      ->delimiter(',');
  train_cmd->add_option("--height", train.height, "Model input height");
  train_cmd->add_option("--width", train.width, "Model input width");
  train_cmd->callback([&train] { run_train(train); });

  DenoiseArgs denoise;
  CLI::App* denoise_cmd =
      app.add_subcommand("denoise", "Denoise a single image");
  denoise_cmd->add_option("--ckpt", denoise.ckpt, "Checkpoint")->required();
  denoise_cmd->add_option("--in", denoise.in_path, "Input image")->required();
  denoise_cmd->add_option("--out", denoise.out_path, "Output image")
      ->required();
  denoise_cmd->add_option("--reference", denoise.reference,
                          "Clean reference for PSNR");
  denoise_cmd->callback([&denoise] { run_denoise(denoise); });

  EvalArgs eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  eval_cmd->add_option("--ckpt", eval.ckpt, "Checkpoint")->required();
  eval_cmd->add_option("--manifest", eval.manifest, "Dataset manifest")
      ->required();
  eval_cmd->add_option("--split", eval.split, "Split to evaluate")
      ->required()
      ->check(CLI::IsMember({"val", "test"}));
  eval_cmd->add_option("--out", eval.out_path, "Output metrics CSV")
      ->required();
  eval_cmd->add_option("--seed", eval.seed, "Noise seed");
  eval_cmd->callback([&eval] { run_eval(eval); });

  ReportArgs report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Summarize a metrics CSV");
  report_cmd->add_option("--in", report.in_path, "Metrics CSV")->required();
  report_cmd->add_option("--out", report.out_path, "Output file")->required();
  report_cmd->add_option("--format", report.format, "Output format")
      ->required()
      ->check(CLI::IsMember({"csv", "json"}));
  report_cmd->callback([&report] { run_report(report); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const numeric_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
