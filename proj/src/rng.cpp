#include "hypofrac/rng.hpp"

namespace hypofrac::rng {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive(std::uint64_t root, std::string_view label, std::uint64_t replica,
                     std::uint64_t component) noexcept {
  std::uint64_t s = splitmix64(root);
  s = splitmix64(s ^ hash_label(label));
  s = splitmix64(s ^ replica);
  s = splitmix64(s ^ (component * 0xd1342543de82ef95ULL + 1));
  return s;
}

}  // namespace hypofrac::rng
