#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace rudn {

// Deterministic random source built on std::mt19937_64, whose output
// sequence is pinned by the C++ standard. All distribution transforms are
// implemented here (not via std:: distributions, which are
// implementation-defined), so any (seed, draw sequence) pair reproduces
// bit-identical values on every platform.
//
// Streams: a child Rng derived via stream("name") depends only on the parent
// seed and the name, never on the parent's draw position. Records in a
// pipeline each get their own named stream so materialization order does not
// matter.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng stream(std::string_view name) const;
  Rng stream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal();

  // Unbiased integer on [0, n), by rejection.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates with the pinned integer draw above. std::shuffle is
  // implementation-defined and is deliberately not used.
  template <class T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      std::size_t j = static_cast<std::size_t>(below(i + 1));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace rudn
