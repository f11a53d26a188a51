#pragma once

#include <string>
#include <vector>

#include "rudn/evaluate.hpp"

namespace rudn {

// Population statistics plus a type-7 five-number summary.
struct Aggregate {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double minv = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double maxv = 0.0;
};

Aggregate aggregate(std::vector<double> values);  // empty input rejected

// mean/std rendered the usual "12.345 ± 0.678" way.
std::string mean_pm_std(const Aggregate& a);

// Groups rows per source family (plus an "all" group) and summarizes every
// numeric metrics column. CSV emits one line per (source, metric); JSON nests
// source -> metric -> summary. Both carry identical numbers.
void write_report(const MetricsReport& report, const std::string& out_path,
                  const std::string& format);  // "csv" or "json"

}  // namespace rudn
