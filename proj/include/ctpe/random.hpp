#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ctpe {

// Seeded uniform stream. Every draw consumes exactly one engine output, so
// the number of draws fully describes the stream position.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Independent stream keyed by a base seed and a list of labels
  // (iteration, component, ...). Same keys give the same stream.
  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  std::uint64_t draws() const { return draws_; }

 private:
  explicit RandomStream(std::seed_seq& seq);

  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace ctpe
