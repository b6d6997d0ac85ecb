// Copyright 2026 The Adtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADTOMO_RNG_H_
#define ADTOMO_RNG_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "absl/strings/string_view.h"

namespace adtomo {

// SplitMix64 finalizer. Bijective on 64-bit words.
uint64_t Mix64(uint64_t x);

// FNV-1a over the bytes of `s`, finalized with Mix64.
uint64_t HashString(absl::string_view s);

// Substream seed derivation. Every random stream in the library is keyed by
// (master seed, stage label, coordinates...), so results never depend on the
// order in which independent units of work are executed.
uint64_t DeriveSeed(uint64_t seed, absl::string_view stage,
                    std::initializer_list<uint64_t> coordinates = {});

// Thin wrapper over mt19937_64 with distribution code written out explicitly,
// so streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of precision.
  double Uniform();

  // Always consumes exactly one draw.
  bool Bernoulli(double p) { return Uniform() < p; }

  // Box-Muller; consumes exactly two draws.
  double Normal(double mean, double sd);

  // Uniform integer in [0, n). n must be positive.
  size_t UniformIndex(size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace adtomo

#endif  // ADTOMO_RNG_H_
