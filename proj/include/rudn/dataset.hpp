#pragma once

#include <array>
#include <string>
#include <vector>

#include "rudn/image_io.hpp"
#include "rudn/rng.hpp"

namespace rudn {

enum class SplitName { kTrain, kVal, kTest };

const char* split_name(SplitName s);
SplitName parse_split(const std::string& name);  // throws data_error

struct DatasetSplit {
  std::vector<std::string> train, val, test;
};

// Seeded shuffle, then a partition whose sizes follow the largest-remainder
// rule (ties resolved in train, val, test order). Fractions must sum to 1
// within 1e-9; fewer than 3 ids is a data error.
DatasetSplit split_dataset(const std::vector<std::string>& ids,
                           const std::array<double, 3>& fractions, Rng& rng);

inline constexpr std::array<double, 3> kDefaultFractions = {0.70, 0.15, 0.15};

// One record per line: id <TAB> relative_path <TAB> split <TAB> source.
struct ManifestEntry {
  std::string id;
  std::string relative_path;
  SplitName split = SplitName::kTrain;
  Source source = Source::kExternal;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);
void save_manifest(const std::vector<ManifestEntry>& entries,
                   const std::string& path);

}  // namespace rudn
