#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rudn/pipeline.hpp"
#include "rudn/resunet.hpp"

namespace rudn {

// One evaluated image: quality of the noisy input and of the denoised output,
// both against the clean reference.
struct MetricsRow {
  std::string id;
  Source source = Source::kExternal;
  double sigma = 0.0;
  double psnr_paper_noisy = 0.0;
  double psnr_std_noisy = 0.0;
  double ssim_noisy = 0.0;
  double psnr_paper_denoised = 0.0;
  double psnr_std_denoised = 0.0;
  double ssim_denoised = 0.0;
};

inline constexpr std::array<const char*, 7> kMetricColumns = {
    "sigma",
    "psnr_paper_noisy",
    "psnr_std_noisy",
    "ssim_noisy",
    "psnr_paper_denoised",
    "psnr_std_denoised",
    "ssim_denoised",
};

double metric_column(const MetricsRow& row, std::size_t column);

struct MetricsReport {
  std::vector<MetricsRow> rows;  // sorted by id
};

// For each record: draw sigma from the record's own named stream, corrupt,
// run an infer-mode forward, and score noisy and denoised against the clean
// image (windowed SSIM, both PSNR forms). Records must match the model dims.
MetricsReport evaluate_model(ResUNet<float>& model,
                             const std::vector<ImageRecord>& records,
                             const NoiseConfig& noise, std::uint64_t seed);

// CSV with the fixed header id,source,sigma,psnr_paper_noisy,psnr_std_noisy,
// ssim_noisy,psnr_paper_denoised,psnr_std_denoised,ssim_denoised; numbers are
// shortest round-trip decimals.
void write_metrics_csv(const MetricsReport& report, const std::string& path);
MetricsReport read_metrics_csv(const std::string& path);

}  // namespace rudn
