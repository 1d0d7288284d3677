// Copyright 2026 The irfs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>

namespace irfs::rng {

// splitmix64 finalizer. Bijective, strong avalanche; the basis for all
// randomness in the library so that results are a pure function of the
// mixed-in words and never depend on call order or platform.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a sequence of words into one key.
constexpr std::uint64_t key_of(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t w : words) {
    h = mix64(h ^ mix64(w));
  }
  return h;
}

// Maps 64 random bits onto [0, 1) with 53-bit resolution.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Domain-separation tags so that draws made for different purposes never
// share a stream even under equal (seed, epoch, id) triples.
inline constexpr std::uint64_t kTagExtraCopy = 0x01;
inline constexpr std::uint64_t kTagShuffle = 0x02;
inline constexpr std::uint64_t kTagSynthImages = 0x03;
inline constexpr std::uint64_t kTagSynthInstances = 0x04;

// Counter-based generator: a fixed key plus an incrementing counter. Jumping
// to any position is O(1), so draws can be made out of order or in parallel
// and still reproduce bit-exactly.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  double next_unit() noexcept { return to_unit(next()); }

  // Unbiased draw from [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    if (bound < 2) return 0;
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    std::uint64_t bits = next();
    while (bits < threshold) {
      bits = next();
    }
    return bits % bound;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace irfs::rng
