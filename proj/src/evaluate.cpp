#include "rudn/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <system_error>

#include "rudn/errors.hpp"
#include "rudn/metrics.hpp"

namespace rudn {

namespace {

constexpr const char* kCsvHeader =
    "id,source,sigma,psnr_paper_noisy,psnr_std_noisy,ssim_noisy,"
    "psnr_paper_denoised,psnr_std_denoised,ssim_denoised";

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw data_error(context + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

double metric_column(const MetricsRow& row, std::size_t column) {
  switch (column) {
    case 0: return row.sigma;
    case 1: return row.psnr_paper_noisy;
    case 2: return row.psnr_std_noisy;
    case 3: return row.ssim_noisy;
    case 4: return row.psnr_paper_denoised;
    case 5: return row.psnr_std_denoised;
    case 6: return row.ssim_denoised;
    default: throw std::out_of_range("metric_column: bad index");
  }
}

MetricsReport evaluate_model(ResUNet<float>& model,
                             const std::vector<ImageRecord>& records,
                             const NoiseConfig& noise, std::uint64_t seed) {
  noise.validate();
  const ModelConfig& cfg = model.config();
  const Rng root = Rng(seed).stream("eval");

  MetricsReport report;
  report.rows.reserve(records.size());
  for (const ImageRecord& rec : records) {
    if (rec.pixels.shape.h != cfg.input_height ||
        rec.pixels.shape.w != cfg.input_width) {
      throw data_error("evaluate: record '" + rec.id + "' has dims " +
                       rec.pixels.shape.str() + ", model expects (1," +
                       std::to_string(cfg.input_height) + "," +
                       std::to_string(cfg.input_width) + ",1)");
    }
    Rng rec_rng = root.stream(rec.id);
    auto [noisy, sigma] = add_noise(rec, noise, rec_rng);
    Tensor denoised = model.forward(noisy.pixels, Mode::kInfer);

    MetricsRow row;
    row.id = rec.id;
    row.source = rec.source;
    row.sigma = sigma;
    row.psnr_paper_noisy = psnr_paper(rec.pixels, noisy.pixels);
    row.psnr_std_noisy = psnr_standard(rec.pixels, noisy.pixels);
    row.ssim_noisy = ssim(rec.pixels, noisy.pixels);
    row.psnr_paper_denoised = psnr_paper(rec.pixels, denoised);
    row.psnr_std_denoised = psnr_standard(rec.pixels, denoised);
    row.ssim_denoised = ssim(rec.pixels, denoised);
    report.rows.push_back(std::move(row));
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const MetricsRow& a, const MetricsRow& b) { return a.id < b.id; });
  return report;
}

void write_metrics_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw data_error(path + ": cannot open metrics file for writing");
  out << kCsvHeader << '\n';
  for (const MetricsRow& r : report.rows) {
    out << r.id << ',' << source_name(r.source);
    for (std::size_t col = 0; col < kMetricColumns.size(); ++col) {
      out << ',' << format_double(metric_column(r, col));
    }
    out << '\n';
  }
  if (!out) throw data_error(path + ": metrics write failed");
}

MetricsReport read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error(path + ": cannot open metrics file");
  std::string line;
  if (!std::getline(in, line)) {
    throw data_error(path + ":1: empty metrics file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw data_error(path + ":1: unexpected metrics header");
  }
  MetricsReport report;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> field;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        field.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    const std::string context = path + ":" + std::to_string(line_no);
    if (field.size() != 9) {
      throw data_error(context + ": expected 9 comma-separated fields, got " +
                       std::to_string(field.size()));
    }
    MetricsRow row;
    row.id = field[0];
    try {
      row.source = parse_source(field[1]);
    } catch (const data_error& e) {
      throw data_error(context + ": " + e.what());
    }
    row.sigma = parse_double(field[2], context);
    row.psnr_paper_noisy = parse_double(field[3], context);
    row.psnr_std_noisy = parse_double(field[4], context);
    row.ssim_noisy = parse_double(field[5], context);
    row.psnr_paper_denoised = parse_double(field[6], context);
    row.psnr_std_denoised = parse_double(field[7], context);
    row.ssim_denoised = parse_double(field[8], context);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace rudn
