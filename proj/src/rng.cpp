#include "rebal/rng.hpp"

#include <stdexcept>

namespace rebal {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// FNV-1a followed by a finalizer.
std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

RandomStream::result_type RandomStream::operator()() {
  ++counter_;
  return mix64(key_ ^ mix64(counter_ * kGamma));
}

double RandomStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() { return normal_(*this); }

std::size_t RandomStream::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(*this);
}

double RandomStream::gamma(double shape) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(*this);
}

RandomStream derive_substream(std::uint64_t master_seed,
                              std::uint64_t seed_index,
                              std::string_view component_label) {
  std::uint64_t key = mix64(master_seed + kGamma);
  key = mix64(key ^ mix64(seed_index * 0xd1b54a32d192ed03ULL + 1));
  key = mix64(key ^ hash_label(component_label));
  return RandomStream(key);
}

}  // namespace rebal
