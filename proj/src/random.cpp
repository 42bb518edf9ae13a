#include "ctpe/random.hpp"

#include <algorithm>
#include <vector>

namespace ctpe {

namespace {

std::seed_seq make_seq(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (keys.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (std::uint64_t k : keys) push(k);
  return std::seed_seq(words.begin(), words.end());
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
  auto seq = make_seq(seed, {});
  engine_.seed(seq);
}

RandomStream::RandomStream(std::seed_seq& seq) { engine_.seed(seq); }

RandomStream RandomStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  auto seq = make_seq(seed, keys);
  return RandomStream(seq);
}

double RandomStream::uniform() {
  ++draws_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::index(std::uint64_t n) {
  const auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return std::min(i, n - 1);
}

}  // namespace ctpe
