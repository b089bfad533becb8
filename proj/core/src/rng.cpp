#include "lpp/rng.hpp"

#include <string>

namespace lpp {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  Rng mix(master ^ 0xd1b54a32d192ed03ull);
  std::uint64_t h = mix.next();
  h ^= a + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  Rng mix2(h);
  h = mix2.next();
  h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  Rng mix3(h);
  h = mix3.next();
  h ^= c + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return Rng(h).next();
}

std::uint64_t hash_string_seed(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace lpp
