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

#include "linkgate/tensor/tape.hpp"

#include <utility>

#include "linkgate/error.hpp"

namespace linkgate {

const Tensor& Var::value() const { return tape_->value(id_); }

bool Var::requires_grad() const { return tape_->requires_grad(id_); }

void ParameterStore::add(const std::string& name, Tensor init) {
  if (!tensors_.emplace(name, std::move(init)).second) {
    throw ConfigError("duplicate parameter '" + name + "'");
  }
}

Tensor& ParameterStore::get(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw LookupError("unknown parameter '" + name + "'");
  return it->second;
}

const Tensor& ParameterStore::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw LookupError("unknown parameter '" + name + "'");
  return it->second;
}

std::size_t ParameterStore::total_size() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.size();
  return n;
}

Tensor* BackwardContext::grad(const Var& input) {
  const auto id = static_cast<std::size_t>(input.id());
  if (!tape_->requires_grad(input.id())) return nullptr;
  auto& slot = (*grads_)[id];
  if (!slot) slot.emplace(tape_->value(input.id()).shape());
  return &*slot;
}

const Tensor* Gradients::of(const Var& v) const {
  const auto id = static_cast<std::size_t>(v.id());
  if (id >= by_node_.size() || !by_node_[id]) return nullptr;
  return &*by_node_[id];
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), false, {}, {}});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::leaf(Tensor value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), requires_grad && record_, {}, {}});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Tape::param(const ParameterStore& store, const std::string& name) {
  if (auto it = param_nodes_.find(name); it != param_nodes_.end()) return Var(this, it->second);
  nodes_.push_back(Node{store.get(name), record_, {}, name});
  const int id = static_cast<int>(nodes_.size() - 1);
  param_nodes_.emplace(name, id);
  return Var(this, id);
}

Var Tape::record(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
  bool needs = false;
  if (record_) {
    for (const Var& in : inputs) {
      if (in.tape() != this) throw UsageError("operation mixes variables from different tapes");
      needs = needs || nodes_[static_cast<std::size_t>(in.id())].requires_grad;
    }
  }
  nodes_.push_back(Node{std::move(value), needs, needs ? std::move(backward) : BackwardFn{}, {}});
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Gradients Tape::backward(const Var& loss) const {
  if (loss.tape() != this) throw UsageError("backward: loss belongs to another tape");
  if (loss.value().size() != 1) {
    throw UsageError("backward: loss must be scalar, got shape " +
                     shape_string(loss.value().shape()));
  }
  Gradients out;
  out.by_node_.resize(nodes_.size());
  const auto root = static_cast<std::size_t>(loss.id());
  if (nodes_[root].requires_grad) {
    out.by_node_[root].emplace(nodes_[root].value.shape(), 1.0);
  }
  for (std::size_t i = root + 1; i-- > 0;) {
    const Node& node = nodes_[i];
    if (!node.backward || !out.by_node_[i]) continue;
    BackwardContext ctx(&*out.by_node_[i], &out.by_node_, this);
    node.backward(ctx);
  }
  for (const auto& [name, id] : param_nodes_) {
    const auto& g = out.by_node_[static_cast<std::size_t>(id)];
    out.params_.emplace(name, g ? *g : Tensor(nodes_[static_cast<std::size_t>(id)].value.shape()));
  }
  return out;
}

}  // namespace linkgate
