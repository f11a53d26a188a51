#include "rudn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "rudn/errors.hpp"

namespace rudn {

const char* split_name(SplitName s) {
  switch (s) {
    case SplitName::kTrain: return "train";
    case SplitName::kVal: return "val";
    case SplitName::kTest: return "test";
  }
  return "train";
}

SplitName parse_split(const std::string& name) {
  if (name == "train") return SplitName::kTrain;
  if (name == "val") return SplitName::kVal;
  if (name == "test") return SplitName::kTest;
  throw data_error("unknown split: '" + name + "'");
}

DatasetSplit split_dataset(const std::vector<std::string>& ids,
                           const std::array<double, 3>& fractions, Rng& rng) {
  const double total = fractions[0] + fractions[1] + fractions[2];
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("split_dataset: fractions must sum to 1");
  }
  if (ids.size() < 3) {
    throw data_error("split_dataset: need at least 3 records, got " +
                     std::to_string(ids.size()));
  }
  std::vector<std::string> shuffled = ids;
  rng.shuffle(shuffled);

  const std::size_t n = shuffled.size();
  std::array<std::size_t, 3> counts;
  std::array<double, 3> remainder;
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = fractions[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - std::floor(exact);
    assigned += counts[i];
  }
  // largest remainder first; the stable sort keeps train, val, test order on
  // ties (an argmax loop here is fragile: vectorizers may break equal cases)
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int k = 0; assigned < n; ++k, ++assigned) {
    ++counts[order[k]];
  }

  DatasetSplit out;
  std::size_t pos = 0;
  out.train.assign(shuffled.begin(), shuffled.begin() + counts[0]);
  pos += counts[0];
  out.val.assign(shuffled.begin() + pos, shuffled.begin() + pos + counts[1]);
  pos += counts[1];
  out.test.assign(shuffled.begin() + pos, shuffled.end());
  return out;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error(path + ": cannot open manifest");
  std::vector<ManifestEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::array<std::string, 4> field;
    std::size_t start = 0;
    int nf = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == '\t') {
        if (nf >= 4) {
          throw data_error(path + ":" + std::to_string(line_no) +
                           ": expected 4 tab-separated fields");
        }
        field[nf++] = line.substr(start, i - start);
        start = i + 1;
      }
    }
    if (nf != 4 || field[0].empty() || field[1].empty()) {
      throw data_error(path + ":" + std::to_string(line_no) +
                       ": expected 4 tab-separated fields "
                       "(id, relative_path, split, source)");
    }
    ManifestEntry e;
    e.id = field[0];
    e.relative_path = field[1];
    try {
      e.split = parse_split(field[2]);
      e.source = parse_source(field[3]);
    } catch (const data_error& err) {
      throw data_error(path + ":" + std::to_string(line_no) + ": " +
                       err.what());
    }
    entries.push_back(std::move(e));
  }
  if (entries.empty()) {
    throw data_error(path + ": manifest has no records");
  }
  return entries;
}

void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw data_error(path + ": cannot open manifest for writing");
  for (const ManifestEntry& e : entries) {
    out << e.id << '\t' << e.relative_path << '\t' << split_name(e.split)
        << '\t' << source_name(e.source) << '\n';
  }
  if (!out) throw data_error(path + ": manifest write failed");
}

}  // namespace rudn
