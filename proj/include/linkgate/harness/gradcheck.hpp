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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "linkgate/model/config.hpp"

namespace linkgate::harness {

struct GradcheckOptions {
  std::size_t dim = 8;
  std::size_t gnn_steps = 2;
  std::uint64_t seed = 7;
  GateMode gate_mode = GateMode::Dynamic;
  double threshold = 1e-4;
  double step = 1e-5;
  // Test hook: edits the analytic parameter gradients before comparison.
  std::function<void(std::map<std::string, Tensor>&)> corrupt;
};

struct GradcheckGroup {
  std::string name;  // "op:<name>" or "param:<parameter name>"
  std::size_t size = 0;
  double max_error = 0.0;
  bool pass = false;
};

struct GradcheckReport {
  std::vector<GradcheckGroup> groups;
  bool pass = false;
  std::string worst_group;
  double worst_error = 0.0;

  nlohmann::json to_json() const;
};

// |a - n| / max(|a|, |n|, 1e-3).
double gradient_error(double analytic, double numeric);

// Central differences against the tape for a suite of operations and model
// pieces, then for every parameter of the end-to-end teacher-forced loss on
// a two-table schema with a four-token question. Every parameter tensor
// appears exactly once.
GradcheckReport run_gradcheck(const GradcheckOptions& options = {});

}  // namespace linkgate::harness
