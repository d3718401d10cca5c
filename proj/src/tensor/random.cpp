// Copyright 2026 The Linkgate Authors.
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

#include "linkgate/tensor/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "linkgate/error.hpp"

namespace linkgate {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw UsageError("uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal(double mean, double stddev) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return mean + stddev * radius * std::cos(angle);
}

double glorot_bound(const Shape& shape) {
  if (shape.empty()) throw ConfigError("glorot_init: empty shape");
  const double fan_out = static_cast<double>(shape[0]);
  double fan_in = 1.0;
  for (std::size_t i = 1; i < shape.size(); ++i) fan_in *= static_cast<double>(shape[i]);
  return std::sqrt(6.0 / (fan_in + fan_out));
}

Tensor glorot_init(const Shape& shape, Rng& rng) {
  const double bound = glorot_bound(shape);
  Tensor out(shape);
  for (double& v : out.data()) v = rng.uniform(-bound, bound);
  return out;
}

Tensor normal_init(const Shape& shape, double stddev, Rng& rng) {
  Tensor out(shape);
  for (double& v : out.data()) v = rng.normal(0.0, stddev);
  return out;
}

}  // namespace linkgate
