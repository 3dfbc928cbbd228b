#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hypofrac::rng {

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t hash_label(std::string_view label) noexcept;

/// Seed for the substream (label, replica, component) of a root seed.
/// Substreams depend only on their coordinates, never on scheduling.
std::uint64_t derive(std::uint64_t root, std::string_view label, std::uint64_t replica,
                     std::uint64_t component = 0) noexcept;

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  Stream(std::uint64_t root, std::string_view label, std::uint64_t replica,
         std::uint64_t component = 0)
      : engine_(derive(root, label, replica, component)) {}

  double gaussian() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace hypofrac::rng
