// Training engine tests: Adam updates, checkpoint round trips and
// validation, the training loop's determinism and bookkeeping, evaluation
// against manually recomputed metrics, and report aggregation.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracle_helpers.hpp"
#include "rudn/adam.hpp"
#include "rudn/checkpoint.hpp"
#include "rudn/errors.hpp"
#include "rudn/evaluate.hpp"
#include "rudn/metrics.hpp"
#include "rudn/phantom.hpp"
#include "rudn/report.hpp"
#include "rudn/train.hpp"

using namespace rudn;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "rudn_test_engine";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string tmp_file(const std::string& name) {
  return (tmp_dir() / name).string();
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

ModelConfig tiny_model_config() {
  ModelConfig mc;
  mc.input_height = 32;
  mc.input_width = 64;
  mc.depth = 1;
  mc.channels = {4};
  mc.bottleneck_channels = 8;
  mc.seed = 5;
  return mc;
}

std::vector<ImageRecord> tiny_records(int count, std::uint64_t seed0) {
  std::vector<ImageRecord> recs;
  for (int i = 0; i < count; ++i) {
    PhantomConfig pc;
    pc.height = 32;
    pc.width = 64;
    pc.seed = seed0 + static_cast<std::uint64_t>(i);
    ImageRecord rec = generate_phantom(pc);
    rec.id = "rec_" + std::to_string(i);
    recs.push_back(std::move(rec));
  }
  return recs;
}

}  // namespace

TEST_CASE("Adam: canonical first step moves 1.0 to 0.9999") {
  Parameter<double> p("theta", Shape{1, 1, 1, 1});
  p.value.fill(1.0);
  p.grad.fill(1.0);
  Adam<double> adam({&p});  // defaults: lr 1e-4
  adam.step();
  // mhat = 1, vhat = 1 -> theta = 1 - lr / (1 + eps)
  const double want = 1.0 - 1e-4 / (1.0 + 1e-8);
  CHECK(p.value.data[0] == doctest::Approx(want).epsilon(1e-15));
  CHECK(std::abs(p.value.data[0] - 0.9999) < 1e-9);
  CHECK(adam.t() == 1);

  Parameter<float> pf("theta", Shape{1, 1, 1, 1});
  pf.value.fill(1.0f);
  pf.grad.fill(1.0f);
  Adam<float> adamf({&pf});
  adamf.step();
  CHECK(pf.value.data[0] == doctest::Approx(0.9999).epsilon(1e-6));
}

TEST_CASE("Adam: zero gradient leaves the value unchanged") {
  Parameter<double> p("theta", Shape{1, 2, 2, 1});
  p.value.fill(0.5);
  p.zero_grad();
  Adam<double> adam({&p});
  adam.step();
  adam.step();
  for (double v : p.value.data) CHECK(v == 0.5);
  CHECK(adam.t() == 2);
}

TEST_CASE("Adam: beta1 = beta2 = 0 reduces to sign descent") {
  AdamConfig cfg;
  cfg.beta1 = 0.0;
  cfg.beta2 = 0.0;
  cfg.lr = 0.01;
  Parameter<double> p("theta", Shape{1, 1, 2, 1});
  p.value.data = {1.0, -1.0};
  p.grad.data = {3.0, -0.25};
  Adam<double> adam({&p}, cfg);
  adam.step();
  // update = -lr * g / (|g| + eps) ~= -lr * sign(g)
  CHECK(p.value.data[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-7));
  CHECK(p.value.data[1] == doctest::Approx(-1.0 + 0.01).epsilon(1e-7));
}

TEST_CASE("Adam: converges on a quadratic bowl") {
  Parameter<double> p("theta", Shape{1, 1, 1, 1});
  p.value.fill(1.0);
  AdamConfig cfg;
  cfg.lr = 0.05;
  Adam<double> adam({&p}, cfg);
  for (int i = 0; i < 300; ++i) {
    p.grad.data[0] = 2.0 * p.value.data[0];  // d/dx x^2
    adam.step();
  }
  CHECK(std::abs(p.value.data[0]) < 1e-2);
}

TEST_CASE("Adam: non-finite gradient aborts before touching any state") {
  Parameter<double> a("w.a", Shape{1, 1, 1, 1});
  Parameter<double> b("w.b", Shape{1, 1, 1, 1});
  a.value.fill(1.0);
  b.value.fill(2.0);
  a.grad.fill(0.5);
  b.grad.fill(std::numeric_limits<double>::quiet_NaN());
  Adam<double> adam({&a, &b});
  try {
    adam.step();
    FAIL("expected numeric_error");
  } catch (const numeric_error& e) {
    CHECK(std::string(e.what()).find("w.b") != std::string::npos);
  }
  CHECK(a.value.data[0] == 1.0);  // the healthy parameter was not updated
  CHECK(b.value.data[0] == 2.0);
  CHECK(adam.t() == 0);

  b.grad.fill(std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(adam.step(), numeric_error);
  CHECK(adam.t() == 0);
}

TEST_CASE("Adam: identical runs produce identical trajectories") {
  auto run = [] {
    Parameter<double> p("theta", Shape{1, 2, 2, 2});
    for (std::size_t i = 0; i < p.value.data.size(); ++i)
      p.value.data[i] = 0.1 * static_cast<double>(i + 1);
    Adam<double> adam({&p});
    for (int s = 0; s < 5; ++s) {
      for (std::size_t i = 0; i < p.grad.data.size(); ++i)
        p.grad.data[i] = std::sin(static_cast<double>(s + 1) *
                                  static_cast<double>(i + 1));
      adam.step();
    }
    return p.value.data;
  };
  CHECK(run() == run());
}

TEST_CASE("checkpoint: save -> load -> save is byte-identical") {
  ModelConfig mc = tiny_model_config();
  ResUNet<float> model(mc);

  // a couple of optimizer steps so moments and t are non-trivial
  auto params = model.params();
  std::vector<Parameter<float>*> trainable;
  for (auto* p : params)
    if (p->trainable) trainable.push_back(p);
  Adam<float> adam(trainable);
  Rng grng(3);
  for (int s = 0; s < 2; ++s) {
    for (auto* p : trainable)
      for (auto& g : p->grad.data)
        g = static_cast<float>(grng.normal() * 0.01);
    adam.step();
  }

  CheckpointMeta meta;
  meta.epoch = 7;
  meta.seed = 42;
  meta.train_loss = 0.012345678901234567;
  meta.val_loss = 0.023456789012345678;

  const std::string p1 = tmp_file("a.ckpt");
  save_checkpoint(p1, model, 0xBEEF1234u, meta, &adam);

  LoadedCheckpoint ck = load_checkpoint(p1);
  CHECK(ck.extractor_seed == 0xBEEF1234u);
  CHECK(ck.meta.epoch == 7);
  CHECK(ck.meta.seed == 42);
  CHECK(ck.meta.train_loss == meta.train_loss);
  CHECK(ck.meta.val_loss == meta.val_loss);
  CHECK(ck.cfg.input_height == mc.input_height);
  CHECK(ck.cfg.channels == mc.channels);
  CHECK(ck.has_adam);
  CHECK(ck.adam_t == 2);

  // every parameter round-trips bitwise
  auto orig = model.params();
  auto loaded = ck.model->params();
  REQUIRE(orig.size() == loaded.size());
  for (std::size_t i = 0; i < orig.size(); ++i) {
    CHECK(loaded[i]->name == orig[i]->name);
    CHECK(loaded[i]->value.data == orig[i]->value.data);
  }

  // moments round-trip through restore_adam
  std::vector<Parameter<float>*> ltrain;
  for (auto* p : ck.model->params())
    if (p->trainable) ltrain.push_back(p);
  Adam<float> adam2(ltrain);
  restore_adam(adam2, ck);
  CHECK(adam2.t() == adam.t());
  for (std::size_t i = 0; i < ltrain.size(); ++i) {
    CHECK(adam2.m(i) == adam.m(i));
    CHECK(adam2.v(i) == adam.v(i));
  }

  const std::string p2 = tmp_file("b.ckpt");
  save_checkpoint(p2, *ck.model, ck.extractor_seed, ck.meta, &adam2);
  CHECK(read_bytes(p1) == read_bytes(p2));
}

TEST_CASE("checkpoint: running statistics are preserved") {
  ModelConfig mc = tiny_model_config();
  ResUNet<float> model(mc);
  // a train-mode forward moves the batch-norm running stats off their init
  Tensor4<float> x(Shape{1, 32, 64, 1});
  Rng rng(8);
  for (auto& v : x.data) v = static_cast<float>(rng.uniform());
  (void)model.forward(x, Mode::kTrain);

  const std::string p = tmp_file("stats.ckpt");
  save_checkpoint(p, model, 1, CheckpointMeta{});
  LoadedCheckpoint ck = load_checkpoint(p);

  auto a = model.state_tensors();
  auto b = ck.model->state_tensors();
  REQUIRE(a.size() == b.size());
  bool any_nontrivial = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second->data == b[i].second->data);
    for (float v : a[i].second->data)
      if (v != 0.0f && v != 1.0f) any_nontrivial = true;
  }
  CHECK(any_nontrivial);

  // and infer-mode outputs of the two models agree bitwise
  Tensor4<float> y1 = model.forward(x, Mode::kInfer);
  Tensor4<float> y2 = ck.model->forward(x, Mode::kInfer);
  CHECK(y1.data == y2.data);
}

TEST_CASE("checkpoint: corrupt files are rejected") {
  ModelConfig mc = tiny_model_config();
  ResUNet<float> model(mc);
  const std::string good = tmp_file("good.ckpt");
  save_checkpoint(good, model, 1, CheckpointMeta{});
  std::string bytes = read_bytes(good);

  const std::string bad = tmp_file("bad.ckpt");
  auto write_and_expect = [&](const std::string& b) {
    std::ofstream out(bad, std::ios::binary | std::ios::trunc);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
    out.close();
    CHECK_THROWS_AS((void)load_checkpoint(bad), data_error);
  };

  std::string wrong_magic = bytes;
  wrong_magic[0] = 'X';
  write_and_expect(wrong_magic);

  write_and_expect(bytes.substr(0, 4));                 // shorter than magic
  write_and_expect(bytes.substr(0, 40));                // truncated manifest
  write_and_expect(bytes.substr(0, bytes.size() - 8));  // truncated blob

  std::string huge_len = bytes;
  huge_len[5] = '\xff';  // absurd manifest length
  huge_len[6] = '\xff';
  huge_len[7] = '\xff';
  write_and_expect(huge_len);

  std::string bad_json = bytes;
  bad_json[13] = '@';  // inside the manifest text
  write_and_expect(bad_json);

  CHECK_THROWS_AS((void)load_checkpoint(tmp_file("missing.ckpt")), data_error);
}

TEST_CASE("checkpoint: the file starts with the magic bytes") {
  ModelConfig mc = tiny_model_config();
  ResUNet<float> model(mc);
  const std::string p = tmp_file("magic.ckpt");
  save_checkpoint(p, model, 1, CheckpointMeta{});
  const std::string bytes = read_bytes(p);
  REQUIRE(bytes.size() > 13);
  CHECK(bytes.substr(0, 5) == "RUDN1");
}

TEST_CASE("TrainConfig validation") {
  TrainConfig cfg;
  cfg.model = tiny_model_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.model = tiny_model_config();
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.model = tiny_model_config();
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.model = tiny_model_config();
  cfg.alpha = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("train_model: identical seeds give identical trajectories") {
  auto recs = tiny_records(4, 100);
  auto val = tiny_records(2, 200);

  TrainConfig cfg;
  cfg.model = tiny_model_config();
  cfg.epochs = 3;
  cfg.batch_size = 2;
  cfg.learning_rate = 1e-3;
  cfg.seed = 7;

  auto run = [&] {
    ResUNet<float> model(cfg.model);
    FeatureExtractorConfig fec;
    fec.stages = 2;
    fec.channels = {4, 8};
    FeatureExtractor<float> fx(fec);
    TrainResult r = train_model(model, fx, recs, val, cfg);
    std::vector<float> weights;
    for (auto* p : model.params())
      weights.insert(weights.end(), p->value.data.begin(),
                     p->value.data.end());
    return std::make_pair(r, weights);
  };

  auto [r1, w1] = run();
  auto [r2, w2] = run();
  REQUIRE(r1.log.size() == 3);
  for (std::size_t i = 0; i < r1.log.size(); ++i) {
    CHECK(r1.log[i].epoch == static_cast<int>(i) + 1);
    CHECK(r1.log[i].train_loss == r2.log[i].train_loss);
    CHECK(r1.log[i].val_loss == r2.log[i].val_loss);
    CHECK(std::isfinite(r1.log[i].train_loss));
  }
  CHECK(w1 == w2);
  CHECK(r1.best_epoch == r2.best_epoch);
}

TEST_CASE("train_model: losses drop and best-epoch bookkeeping holds") {
  auto recs = tiny_records(6, 300);
  auto val = tiny_records(2, 400);

  TrainConfig cfg;
  cfg.model = tiny_model_config();
  cfg.epochs = 8;
  cfg.batch_size = 3;
  cfg.learning_rate = 2e-3;
  cfg.seed = 11;
  cfg.noise.sigma_min = 0.1;
  cfg.noise.sigma_max = 0.1;

  ResUNet<float> model(cfg.model);
  FeatureExtractorConfig fec;
  fec.stages = 2;
  fec.channels = {4, 8};
  FeatureExtractor<float> fx(fec);

  std::vector<EpochLog> seen;
  TrainResult r = train_model(model, fx, recs, val, cfg,
                              [&](const EpochLog& log) { seen.push_back(log); });

  REQUIRE(r.log.size() == 8);
  REQUIRE(seen.size() == 8);
  for (std::size_t i = 0; i < seen.size(); ++i)
    CHECK(seen[i].epoch == r.log[i].epoch);

  CHECK(r.log.back().train_loss < r.log.front().train_loss);

  double best = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  for (const auto& l : r.log) {
    if (l.val_loss < best) {
      best = l.val_loss;
      best_epoch = l.epoch;
    }
  }
  CHECK(r.best_val_loss == best);
  CHECK(r.best_epoch == best_epoch);
}

TEST_CASE("train_model: wrong record dims raise a data error") {
  auto recs = tiny_records(4, 100);
  recs[2].pixels = Tensor(Shape{1, 16, 16, 1});
  auto val = tiny_records(2, 200);
  TrainConfig cfg;
  cfg.model = tiny_model_config();
  cfg.epochs = 1;
  ResUNet<float> model(cfg.model);
  FeatureExtractorConfig fec;
  fec.stages = 2;
  fec.channels = {4, 8};
  FeatureExtractor<float> fx(fec);
  CHECK_THROWS_AS((void)train_model(model, fx, recs, val, cfg), data_error);
}

TEST_CASE("evaluate_model: rows match a manual recomputation") {
  ModelConfig mc = tiny_model_config();
  ResUNet<float> model(mc);
  // ids deliberately unsorted
  auto recs = tiny_records(3, 500);
  recs[0].id = "charlie";
  recs[1].id = "alpha";
  recs[2].id = "bravo";

  NoiseConfig noise;
  noise.sigma_min = 0.05;
  noise.sigma_max = 0.3;
  const std::uint64_t seed = 99;

  MetricsReport rep = evaluate_model(model, recs, noise, seed);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[0].id == "alpha");
  CHECK(rep.rows[1].id == "bravo");
  CHECK(rep.rows[2].id == "charlie");

  const Rng root = Rng(seed).stream("eval");
  for (const ImageRecord& rec : recs) {
    const MetricsRow* row = nullptr;
    for (const auto& r : rep.rows)
      if (r.id == rec.id) row = &r;
    REQUIRE(row != nullptr);

    Rng rec_rng = root.stream(rec.id);
    auto [noisy, sigma] = add_noise(rec, noise, rec_rng);
    CHECK(row->sigma == sigma);
    CHECK(sigma >= noise.sigma_min);
    CHECK(sigma <= noise.sigma_max);

    Tensor4<float> out = model.forward(noisy.pixels, Mode::kInfer);

    CHECK(row->psnr_paper_noisy ==
          doctest::Approx(psnr_paper(rec.pixels, noisy.pixels))
              .epsilon(1e-12));
    CHECK(row->psnr_std_noisy ==
          doctest::Approx(psnr_standard(rec.pixels, noisy.pixels))
              .epsilon(1e-12));
    CHECK(row->ssim_noisy ==
          doctest::Approx(ssim(rec.pixels, noisy.pixels)).epsilon(1e-12));
    CHECK(row->psnr_paper_denoised ==
          doctest::Approx(psnr_paper(rec.pixels, out)).epsilon(1e-12));
    CHECK(row->psnr_std_denoised ==
          doctest::Approx(psnr_standard(rec.pixels, out)).epsilon(1e-12));
    CHECK(row->ssim_denoised ==
          doctest::Approx(ssim(rec.pixels, out)).epsilon(1e-12));
  }
}

TEST_CASE("evaluate_model: zero noise yields perfect input metrics") {
  ModelConfig mc = tiny_model_config();
  ResUNet<float> model(mc);
  auto recs = tiny_records(2, 600);
  NoiseConfig noise;
  noise.sigma_min = 0.0;
  noise.sigma_max = 0.0;
  MetricsReport rep = evaluate_model(model, recs, noise, 1);
  for (const auto& row : rep.rows) {
    CHECK(row.sigma == 0.0);
    CHECK(std::isinf(row.psnr_paper_noisy));
    CHECK(std::isinf(row.psnr_std_noisy));
    CHECK(row.ssim_noisy == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("evaluate_model: wrong dims raise a data error") {
  ModelConfig mc = tiny_model_config();
  ResUNet<float> model(mc);
  auto recs = tiny_records(2, 700);
  recs[1].pixels = Tensor(Shape{1, 16, 16, 1});
  CHECK_THROWS_AS((void)evaluate_model(model, recs, NoiseConfig{}, 1),
                  data_error);
}

TEST_CASE("metrics CSV: header, round trip, and error reporting") {
  MetricsReport rep;
  MetricsRow r;
  r.id = "img_1";
  r.source = Source::kPosterior;
  r.sigma = 0.125;
  r.psnr_paper_noisy = 13.979400086720377;
  r.psnr_std_noisy = std::numeric_limits<double>::infinity();
  r.ssim_noisy = 0.9756157034869544;
  r.psnr_paper_denoised = 1.0 / 3.0;
  r.psnr_std_denoised = 20.0;
  r.ssim_denoised = 1e-17;
  rep.rows.push_back(r);
  r.id = "img_2";
  r.source = Source::kAnterior;
  r.psnr_std_noisy = -6.0206;
  rep.rows.push_back(r);

  const std::string p = tmp_file("metrics.csv");
  write_metrics_csv(rep, p);

  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "id,source,sigma,psnr_paper_noisy,psnr_std_noisy,ssim_noisy,"
        "psnr_paper_denoised,psnr_std_denoised,ssim_denoised");

  MetricsReport back = read_metrics_csv(p);
  REQUIRE(back.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.rows[i].id == rep.rows[i].id);
    CHECK(back.rows[i].source == rep.rows[i].source);
    for (std::size_t c = 0; c < kMetricColumns.size(); ++c) {
      // shortest round-trip formatting: every double survives bitwise
      CHECK(metric_column(back.rows[i], c) == metric_column(rep.rows[i], c));
    }
  }

  const std::string bad = tmp_file("bad.csv");
  std::ofstream(bad) << "id,source,sigma\n";
  CHECK_THROWS_AS((void)read_metrics_csv(bad), data_error);

  std::ofstream(bad, std::ios::trunc)
      << header << "\n"
      << "a,posterior,0.1,1,2,3,4,5\n";  // one field short
  try {
    (void)read_metrics_csv(bad);
    FAIL("expected data_error");
  } catch (const data_error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }

  std::ofstream(bad, std::ios::trunc)
      << header << "\n"
      << "a,posterior,0.1,1,2,3,4,5,potato\n";
  CHECK_THROWS_AS((void)read_metrics_csv(bad), data_error);
}

TEST_CASE("metric_column maps indexes onto the documented columns") {
  MetricsRow r;
  r.sigma = 1;
  r.psnr_paper_noisy = 2;
  r.psnr_std_noisy = 3;
  r.ssim_noisy = 4;
  r.psnr_paper_denoised = 5;
  r.psnr_std_denoised = 6;
  r.ssim_denoised = 7;
  for (std::size_t i = 0; i < kMetricColumns.size(); ++i)
    CHECK(metric_column(r, i) == static_cast<double>(i + 1));
  CHECK_THROWS_AS((void)metric_column(r, 7), std::out_of_range);
}

TEST_CASE("aggregate: known values, population std, type-7 quartiles") {
  Aggregate a = aggregate({4.0, 1.0, 3.0, 2.0});
  CHECK(a.count == 4);
  CHECK(a.mean == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(a.stddev == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
  CHECK(a.minv == 1.0);
  CHECK(a.maxv == 4.0);
  CHECK(a.median == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(a.q1 == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(a.q3 == doctest::Approx(3.25).epsilon(1e-15));

  Aggregate one = aggregate({5.0});
  CHECK(one.count == 1);
  CHECK(one.mean == 5.0);
  CHECK(one.stddev == 0.0);
  CHECK(one.q1 == 5.0);
  CHECK(one.median == 5.0);
  CHECK(one.q3 == 5.0);

  CHECK_THROWS_AS((void)aggregate({}), std::invalid_argument);
}

TEST_CASE("mean_pm_std renders three decimals with a +/- separator") {
  Aggregate a;
  a.mean = 12.3456;
  a.stddev = 0.6789;
  CHECK(mean_pm_std(a) == "12.346 ± 0.679");
  a.mean = -1.5;
  a.stddev = 0.0;
  CHECK(mean_pm_std(a) == "-1.500 ± 0.000");
}

TEST_CASE("write_report: both formats agree with a recomputation") {
  MetricsReport rep;
  Rng rng(123);
  for (int i = 0; i < 9; ++i) {
    MetricsRow r;
    r.id = "z_" + std::to_string(i);
    r.source = i < 6 ? Source::kPosterior : Source::kAnterior;
    r.sigma = 0.02 + 0.05 * i;
    r.psnr_paper_noisy = 5.0 + rng.uniform();
    r.psnr_std_noisy = 10.0 + rng.uniform();
    r.ssim_noisy = 0.3 + 0.05 * i;
    r.psnr_paper_denoised = 15.0 + rng.uniform();
    r.psnr_std_denoised = 20.0 + rng.uniform();
    r.ssim_denoised = 0.6 + 0.04 * i;
    rep.rows.push_back(r);
  }

  const std::string jpath = tmp_file("report.json");
  const std::string cpath = tmp_file("report.csv");
  write_report(rep, jpath, "json");
  write_report(rep, cpath, "csv");
  CHECK_THROWS_AS(write_report(rep, cpath, "xml"), std::invalid_argument);

  nlohmann::json doc = nlohmann::json::parse(read_bytes(jpath));
  REQUIRE(doc.contains("all"));
  REQUIRE(doc.contains("posterior"));
  REQUIRE(doc.contains("anterior"));

  // recompute each group x metric aggregate independently
  auto group_values = [&](const std::string& group, std::size_t col) {
    std::vector<double> vals;
    for (const auto& r : rep.rows) {
      if (group == "all" || source_name(r.source) == group)
        vals.push_back(metric_column(r, col));
    }
    return vals;
  };
  for (const std::string group : {"all", "posterior", "anterior"}) {
    for (std::size_t c = 0; c < kMetricColumns.size(); ++c) {
      const auto& j = doc.at(group).at(kMetricColumns[c]);
      Aggregate want = aggregate(group_values(group, c));
      CHECK(j.at("count").get<std::size_t>() == want.count);
      CHECK(j.at("mean").get<double>() ==
            doctest::Approx(want.mean).epsilon(1e-9));
      CHECK(j.at("std").get<double>() ==
            doctest::Approx(want.stddev).epsilon(1e-9));
      CHECK(j.at("min").get<double>() == want.minv);
      CHECK(j.at("q1").get<double>() ==
            doctest::Approx(want.q1).epsilon(1e-9));
      CHECK(j.at("median").get<double>() ==
            doctest::Approx(want.median).epsilon(1e-9));
      CHECK(j.at("q3").get<double>() ==
            doctest::Approx(want.q3).epsilon(1e-9));
      CHECK(j.at("max").get<double>() == want.maxv);
      CHECK(j.at("mean_pm_std").get<std::string>() == mean_pm_std(want));
    }
  }

  // CSV: fixed header, one line per (group, metric), numbers matching JSON
  std::ifstream in(cpath);
  std::string line;
  std::getline(in, line);
  CHECK(line ==
        "source,metric,count,mean,std,min,q1,median,q3,max,mean_pm_std");
  int csv_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++csv_rows;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = line.find(',', c2 + 1);
    const std::string group = line.substr(0, c1);
    const std::string metric = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string count_s = line.substr(c2 + 1, c3 - c2 - 1);
    const auto c4 = line.find(',', c3 + 1);
    const std::string mean_s = line.substr(c3 + 1, c4 - c3 - 1);
    const auto& j = doc.at(group).at(metric);
    CHECK(std::stoul(count_s) == j.at("count").get<std::size_t>());
    CHECK(std::stod(mean_s) ==
          doctest::Approx(j.at("mean").get<double>()).epsilon(1e-12));
  }
  CHECK(csv_rows == 3 * 7);
}

TEST_CASE("write_report rejects empty metric sets") {
  MetricsReport rep;
  CHECK_THROWS_AS(write_report(rep, tmp_file("empty.json"), "json"),
                  data_error);
}
