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

#include "linkgate/tensor/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "linkgate/error.hpp"

namespace linkgate::kernels {
namespace {

const KernelSet& select_kernels() {
  if (const char* forced = std::getenv("LINKGATE_KERNELS"); forced != nullptr && *forced) {
    const std::string_view want(forced);
    for (const KernelSet* ks : available()) {
      if (ks->name == want) return *ks;
    }
    throw ConfigError("LINKGATE_KERNELS=" + std::string(want) +
                      " is not available on this machine");
  }
  if (const KernelSet* ks = avx2()) return *ks;
  if (const KernelSet* ks = neon()) return *ks;
  return scalar();
}

}  // namespace

std::vector<const KernelSet*> available() {
  std::vector<const KernelSet*> out{&scalar()};
  if (const KernelSet* ks = avx2()) out.push_back(ks);
  if (const KernelSet* ks = neon()) out.push_back(ks);
  return out;
}

const KernelSet& active() {
  static const KernelSet& chosen = select_kernels();
  return chosen;
}

void gemm_nn(const KernelSet& ks, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double alpha = a[i * k + p];
      if (alpha != 0.0) ks.axpy(alpha, b + p * n, crow, n);
    }
  }
}

void gemm_nt(const KernelSet& ks, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = ks.dot(a + i * k, b + j * k, k);
      c[i * n + j] = accumulate ? c[i * n + j] + v : v;
    }
  }
}

void gemm_tn(const KernelSet& ks, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, 0.0);
  if (n == 1) {
    // Column result: accumulate whole rows of A instead of scalar axpys.
    for (std::size_t p = 0; p < k; ++p) {
      if (b[p] != 0.0) ks.axpy(b[p], a + p * m, c, m);
    }
    return;
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double alpha = a[p * m + i];
      if (alpha != 0.0) ks.axpy(alpha, brow, c + i * n, n);
    }
  }
}

}  // namespace linkgate::kernels
