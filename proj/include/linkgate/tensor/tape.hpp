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
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "linkgate/tensor/tensor.hpp"

namespace linkgate {

class Tape;

// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
  bool requires_grad() const;
  int id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Named trainable tensors. Iteration order is by name, which fixes the order
// of checkpoint manifests and gradient reports.
class ParameterStore {
 public:
  void add(const std::string& name, Tensor init);
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;

  const std::map<std::string, Tensor>& all() const { return tensors_; }
  std::map<std::string, Tensor>& all() { return tensors_; }
  std::size_t total_size() const;

  friend bool operator==(const ParameterStore&, const ParameterStore&) = default;

 private:
  std::map<std::string, Tensor> tensors_;
};

// Given to a node's backward closure: the output gradient plus writable
// gradient buffers of the node's inputs.
class BackwardContext {
 public:
  const Tensor& grad_out() const { return *grad_out_; }
  const Tensor& value(const Var& v) const { return v.value(); }
  // Zero-initialized on first request; nullptr for inputs that need no gradient.
  Tensor* grad(const Var& input);

 private:
  friend class Tape;
  BackwardContext(const Tensor* g, std::vector<std::optional<Tensor>>* grads, const Tape* tape)
      : grad_out_(g), grads_(grads), tape_(tape) {}

  const Tensor* grad_out_;
  std::vector<std::optional<Tensor>>* grads_;
  const Tape* tape_;
};

using BackwardFn = std::function<void(BackwardContext&)>;

// Result of one backward sweep. Gradients of parameters are always present
// (zero when the loss does not depend on them).
class Gradients {
 public:
  const Tensor* of(const Var& v) const;
  const std::map<std::string, Tensor>& params() const { return params_; }

 private:
  friend class Tape;
  std::vector<std::optional<Tensor>> by_node_;
  std::map<std::string, Tensor> params_;
};

// Records the computation graph in creation order, which is a topological
// order. A tape built with record=false evaluates values only.
class Tape {
 public:
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  Var leaf(Tensor value, bool requires_grad = true);
  // Leaf bound to a named parameter; repeated calls return the same node.
  Var param(const ParameterStore& store, const std::string& name);

  Var record(Tensor value, std::span<const Var> inputs, BackwardFn backward);
  Var record(Tensor value, std::initializer_list<Var> inputs, BackwardFn backward) {
    return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }

  // Pure: may be called any number of times on the same tape.
  Gradients backward(const Var& loss) const;

  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }
  const Tensor& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }

 private:
  struct Node {
    Tensor value;
    bool requires_grad = false;
    BackwardFn backward;
    std::string param_name;
  };

  bool record_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, int> param_nodes_;
};

}  // namespace linkgate
