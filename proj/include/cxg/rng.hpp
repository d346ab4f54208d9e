#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cxg {

// Mixes a seed with a stream index so that independent tasks (cells,
// permutations, classes) draw from reproducible, non-overlapping streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// mt19937_64 engine with distribution code kept local, so that draws are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(derive_seed(seed, stream)) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1).
  double uniform();
  // Uniform on [0, n); n > 0.
  std::size_t below(std::size_t n);
  double normal();
  // Index drawn proportionally to non-negative weights with a positive sum.
  std::size_t categorical(std::span<const double> weights);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cxg
