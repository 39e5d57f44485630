#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace rebal {

// Counter-based random stream. The n-th draw is a pure function of (key, n),
// so two streams with the same key always agree draw-for-draw.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream() = default;
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double normal();
  bool bernoulli(double p) { return uniform() < p; }
  std::size_t uniform_index(std::size_t n);
  double gamma(double shape);

  std::uint64_t key() const { return key_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

// Stream for one component of one replication. Distinct triples give
// (with overwhelming probability) unrelated streams.
RandomStream derive_substream(std::uint64_t master_seed,
                              std::uint64_t seed_index,
                              std::string_view component_label);

}  // namespace rebal
