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

#include <functional>
#include <string>
#include <vector>

#include "linkgate/schema/schema.hpp"
#include "linkgate/tensor/tensor.hpp"

namespace linkgate {

struct LinkingWeights {
  double exact = 5.0;
  double partial = 2.0;
  double lemma = 2.0;
  double edit = 1.0;
  double temperature = 1.0;

  friend bool operator==(const LinkingWeights&, const LinkingWeights&) = default;
};

// Returns the embedding of a word, or an empty vector when the word has none.
using WordEmbedder = std::function<std::vector<double>(const std::string&)>;

// Per-feature scores for one (token, entity) pair before weighting.
struct LinkFeatures {
  bool exact = false;
  bool partial = false;
  bool lemma = false;
  double edit_similarity = 0.0;
  double cosine = 0.0;
};

LinkFeatures link_features(const std::vector<std::string>& tokens, std::size_t position,
                           const Entity& entity, const WordEmbedder& embed);

double link_score(const LinkFeatures& f, const LinkingWeights& w);

// |Q| x |V| row-stochastic matrix; row i is a softmax over entities of the
// weighted feature score of token i divided by the temperature. Throws
// UsageError on an empty question or a non-positive temperature.
Tensor build_linking_matrix(const std::vector<std::string>& tokens, const Schema& schema,
                            const WordEmbedder& embed, const LinkingWeights& weights = {});

}  // namespace linkgate
