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
#include <span>
#include <vector>

#include "linkgate/tensor/tape.hpp"

// Differentiable operations. Every function records its result on the tape of
// its first argument. Shape errors throw ConfigError naming both shapes.
namespace linkgate::ops {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
// a * s where s holds a single element.
Var scale(Var a, Var s);
Var scale(Var a, double c);
Var one_minus(Var a);
// Adds a rank-1 v to every row of the matrix m.
Var add_rowwise(Var m, Var v);

// (m,k)x(k,n) -> (m,n); (m,k)x(k) -> (m); (k)x(k,n) -> (n).
Var matmul(Var a, Var b);
// a(m,k) * b(n,k)^T -> (m,n).
Var matmul_nt(Var a, Var b);
Var dot(Var a, Var b);

Var concat(std::span<const Var> parts);
Var stack_rows(std::span<const Var> rows);
Var slice(Var a, std::size_t begin, std::size_t length);
Var row(Var m, std::size_t r);
Var gather_rows(Var m, std::span<const std::size_t> ids);
inline Var embedding_lookup(Var table, std::span<const std::size_t> ids) {
  return gather_rows(table, ids);
}
Var reshape(Var a, Shape shape);

Var tanh(Var a);
Var sigmoid(Var a);
Var log(Var a);

// Rank 1, or rank 2 along `axis` (0 or 1).
Var softmax(Var a, std::size_t axis = 0);
// Softmax over the entries whose mask bit is set, along the last axis. For a
// matrix the same mask applies to every row. Masked entries are exactly zero
// and receive zero gradient. At least one bit must be set.
Var masked_softmax(Var a, const std::vector<bool>& mask);
Var log_softmax(Var a);
Var logsumexp(Var a);
Var sum(Var a);
Var mean(Var a);
Var pick(Var a, std::size_t index);
// -log_probs[target]
Var nll_loss(Var log_probs, std::size_t target);

// Zeroes masked-out entries of a nonnegative vector and rescales the rest to
// sum to one.
Var mask_normalize(Var p, const std::vector<bool>& mask);

// Additive pairwise scores: out(i,j) = v . tanh(W [h_i; h_j]) with W of shape
// (k, 2d) and h of shape (n, d).
Var pairwise_additive_scores(Var h, Var w, Var v);

}  // namespace linkgate::ops
