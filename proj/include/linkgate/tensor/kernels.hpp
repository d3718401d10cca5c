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

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Inner-loop arithmetic for the tensor engine. Every kernel has a portable
// scalar reference; vectorized variants (AVX2+FMA on x86-64, NEON on AArch64)
// are chosen once at startup from CPU capabilities. The variants reorder
// floating-point sums, so they agree with the reference to rounding error, not
// bitwise. Within one process the selection never changes, which keeps runs
// reproducible on a given machine.
//
// Set LINKGATE_KERNELS=scalar (or avx2, neon) to force a variant.

namespace linkgate::kernels {

struct KernelSet {
  std::string_view name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelSet& scalar();
// nullptr when the variant is not compiled in or the CPU lacks support.
const KernelSet* avx2();
const KernelSet* neon();

// Every variant usable on this machine, scalar first.
std::vector<const KernelSet*> available();

// Variant used by the tensor engine.
const KernelSet& active();

// Row-major products. `accumulate` adds into c instead of overwriting it.
//   gemm_nn: c(m,n) = a(m,k) * b(k,n)
//   gemm_nt: c(m,n) = a(m,k) * b(n,k)^T
//   gemm_tn: c(m,n) = a(k,m)^T * b(k,n)
void gemm_nn(const KernelSet& ks, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c, bool accumulate);
void gemm_nt(const KernelSet& ks, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c, bool accumulate);
void gemm_tn(const KernelSet& ks, std::size_t m, std::size_t k, std::size_t n, const double* a,
             const double* b, double* c, bool accumulate);

}  // namespace linkgate::kernels
