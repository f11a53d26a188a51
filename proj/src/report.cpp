#include "rudn/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "rudn/errors.hpp"

namespace rudn {

namespace {

double quantile_type7(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - std::floor(h);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

Aggregate aggregate(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("aggregate: no values");
  }
  Aggregate a;
  a.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / static_cast<double>(a.count);
  double ss = 0.0;
  for (double v : values) {
    const double d = v - a.mean;
    ss += d * d;
  }
  a.stddev = std::sqrt(ss / static_cast<double>(a.count));
  std::sort(values.begin(), values.end());
  a.minv = values.front();
  a.maxv = values.back();
  a.q1 = quantile_type7(values, 0.25);
  a.median = quantile_type7(values, 0.5);
  a.q3 = quantile_type7(values, 0.75);
  return a;
}

std::string mean_pm_std(const Aggregate& a) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.3f ± %.3f", a.mean, a.stddev);
  return buf;
}

void write_report(const MetricsReport& report, const std::string& out_path,
                  const std::string& format) {
  if (report.rows.empty()) {
    throw data_error("report: metrics file has no rows");
  }
  if (format != "csv" && format != "json") {
    throw std::invalid_argument("report: format must be csv or json");
  }

  // source name -> column values, in row order; plus the "all" group
  std::map<std::string, std::vector<const MetricsRow*>> groups;
  for (const MetricsRow& r : report.rows) {
    groups[source_name(r.source)].push_back(&r);
    groups["all"].push_back(&r);
  }

  std::map<std::string, std::map<std::string, Aggregate>> summary;
  for (const auto& [group, rows] : groups) {
    for (std::size_t col = 0; col < kMetricColumns.size(); ++col) {
      std::vector<double> values;
      values.reserve(rows.size());
      for (const MetricsRow* r : rows) values.push_back(metric_column(*r, col));
      summary[group][kMetricColumns[col]] = aggregate(std::move(values));
    }
  }

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw data_error(out_path + ": cannot open report for writing");

  if (format == "csv") {
    out << "source,metric,count,mean,std,min,q1,median,q3,max,mean_pm_std\n";
    for (const auto& [group, metrics] : summary) {
      for (const char* col : kMetricColumns) {
        const Aggregate& a = metrics.at(col);
        out << group << ',' << col << ',' << a.count << ','
            << format_double(a.mean) << ',' << format_double(a.stddev) << ','
            << format_double(a.minv) << ',' << format_double(a.q1) << ','
            << format_double(a.median) << ',' << format_double(a.q3) << ','
            << format_double(a.maxv) << ',' << mean_pm_std(a) << '\n';
      }
    }
  } else {
    nlohmann::json doc;
    for (const auto& [group, metrics] : summary) {
      for (const auto& [metric, a] : metrics) {
        nlohmann::json& j = doc[group][metric];
        j["count"] = a.count;
        j["mean"] = a.mean;
        j["std"] = a.stddev;
        j["min"] = a.minv;
        j["q1"] = a.q1;
        j["median"] = a.median;
        j["q3"] = a.q3;
        j["max"] = a.maxv;
        j["mean_pm_std"] = mean_pm_std(a);
      }
    }
    out << doc.dump(2) << '\n';
  }
  if (!out) throw data_error(out_path + ": report write failed");
}

}  // namespace rudn
