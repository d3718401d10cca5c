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

// Central finite-difference oracle used by the unit tests. Independent of the
// tape: it only evaluates forward values.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "linkgate/tensor/tape.hpp"

namespace linkgate::testing {

using Builder = std::function<Var(Tape&, const std::vector<Var>&)>;

// |a - n| / max(|a|, |n|, 1e-3): relative error with differences below 1e-7
// never exceeding 1e-4.
inline double fd_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

// Worst error over every element of every input.
inline double max_gradient_error(const Builder& build, const std::vector<Tensor>& inputs,
                                 double h = 1e-5) {
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(tape.leaf(t, true));
    const Var loss = build(tape, vars);
    const Gradients grads = tape.backward(loss);
    for (const Var& v : vars) {
      const Tensor* g = grads.of(v);
      analytic.push_back(g ? *g : Tensor(v.shape()));
    }
  }
  auto eval = [&](const std::vector<Tensor>& values) {
    Tape tape(false);
    std::vector<Var> vars;
    for (const Tensor& t : values) vars.push_back(tape.leaf(t, false));
    return build(tape, vars).value()[0];
  };
  double worst = 0.0;
  std::vector<Tensor> work = inputs;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double orig = work[k][i];
      work[k][i] = orig + h;
      const double up = eval(work);
      work[k][i] = orig - h;
      const double down = eval(work);
      work[k][i] = orig;
      worst = std::max(worst, fd_error(analytic[k][i], (up - down) / (2 * h)));
    }
  }
  return worst;
}

}  // namespace linkgate::testing
