#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lancaster {

// A node in a deterministic tree of random streams.
//
// A stream is identified by its path from a master seed. Children are derived
// by appending an index, so a replicate's stream depends only on
// (seed, index path) and never on how many other streams were consumed before
// it. Engines are std::mt19937_64 seeded through std::seed_seq over the path.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : path_{seed} {}

  Stream child(std::uint64_t index) const {
    Stream out = *this;
    out.path_.push_back(index);
    return out;
  }

  std::mt19937_64 engine() const {
    std::vector<std::uint32_t> words;
    words.reserve(2 * path_.size() + 1);
    words.push_back(static_cast<std::uint32_t>(path_.size()));
    for (std::uint64_t v : path_) {
      words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
      words.push_back(static_cast<std::uint32_t>(v >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
  }

  // A fresh 64-bit seed summarising this stream, for APIs that take a seed.
  std::uint64_t derive_seed() const { return engine()(); }

  const std::vector<std::uint64_t>& path() const noexcept { return path_; }

 private:
  std::vector<std::uint64_t> path_;
};

}  // namespace lancaster
