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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "linkgate/tensor/kernels.hpp"
#include "linkgate/tensor/random.hpp"

using namespace linkgate;

namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2, 2);
  return v;
}

}  // namespace

TEST_CASE("kernel selection") {
  const auto sets = kernels::available();
  REQUIRE(!sets.empty());
  CHECK(sets.front()->name == "scalar");
  bool found = false;
  for (const auto* ks : sets) found = found || ks == &kernels::active();
  CHECK(found);
  MESSAGE("active kernels: " << kernels::active().name);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const auto& ref = kernels::scalar();
  Rng rng(99);
  for (const auto* ks : kernels::available()) {
    CAPTURE(ks->name);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 64u, 127u}) {
      CAPTURE(n);
      const auto a = random_vector(n, rng);
      const auto b = random_vector(n, rng);
      double magnitude = 0.0;
      for (std::size_t i = 0; i < n; ++i) magnitude += std::abs(a[i] * b[i]);
      CHECK(std::abs(ks->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <=
            1e-14 * (1.0 + magnitude));

      auto y1 = b, y2 = b;
      ks->axpy(-0.37, a.data(), y1.data(), n);
      ref.axpy(-0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("gemm variants agree with a naive triple loop") {
  Rng rng(5);
  for (const auto* ks : kernels::available()) {
    CAPTURE(ks->name);
    const std::size_t m = 5, k = 7, n = 6;
    const auto a = random_vector(m * k, rng);   // (m,k)
    const auto b = random_vector(k * n, rng);   // (k,n)
    const auto bt = random_vector(n * k, rng);  // (n,k)
    const auto at = random_vector(k * m, rng);  // (k,m)
    std::vector<double> c(m * n), expect(m * n);

    kernels::gemm_nn(*ks, m, k, n, a.data(), b.data(), c.data(), false);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
        expect[i * n + j] = s;
      }
    for (std::size_t i = 0; i < m * n; ++i) CHECK(c[i] == doctest::Approx(expect[i]).epsilon(1e-13));

    kernels::gemm_nt(*ks, m, k, n, a.data(), bt.data(), c.data(), false);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * bt[j * k + p];
        expect[i * n + j] = s;
      }
    for (std::size_t i = 0; i < m * n; ++i) CHECK(c[i] == doctest::Approx(expect[i]).epsilon(1e-13));

    // Accumulating form adds on top of the previous result.
    auto acc = c;
    kernels::gemm_tn(*ks, m, k, n, at.data(), b.data(), acc.data(), true);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0;
        for (std::size_t p = 0; p < k; ++p) s += at[p * m + i] * b[p * n + j];
        CHECK(acc[i * n + j] == doctest::Approx(c[i * n + j] + s).epsilon(1e-13));
      }
  }
}
