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

#include "linkgate/schema/linking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linkgate/error.hpp"
#include "linkgate/schema/text.hpp"

namespace linkgate {
namespace {

// True when some window of tokens covering `position` spells the name.
bool window_matches(const std::vector<std::string>& tokens, std::size_t position,
                    const std::vector<std::string>& name) {
  const std::size_t n = name.size();
  if (n == 0 || n > tokens.size()) return false;
  const std::size_t first = position + 1 >= n ? position + 1 - n : 0;
  for (std::size_t start = first; start <= position && start + n <= tokens.size(); ++start) {
    if (std::equal(name.begin(), name.end(), tokens.begin() + static_cast<std::ptrdiff_t>(start))) {
      return true;
    }
  }
  return false;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || a.size() != b.size()) return 0.0;
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

std::vector<double> mean_embedding(const std::vector<std::string>& words, const WordEmbedder& embed) {
  std::vector<double> sum;
  std::size_t count = 0;
  for (const std::string& w : words) {
    std::vector<double> e = embed(w);
    if (e.empty()) continue;
    if (sum.empty()) sum.assign(e.size(), 0.0);
    if (e.size() != sum.size()) throw UsageError("word embeddings have inconsistent widths");
    for (std::size_t i = 0; i < e.size(); ++i) sum[i] += e[i];
    ++count;
  }
  for (double& v : sum) v /= static_cast<double>(count);
  return sum;
}

}  // namespace

LinkFeatures link_features(const std::vector<std::string>& tokens, std::size_t position,
                           const Entity& entity, const WordEmbedder& embed) {
  LinkFeatures f;
  const std::string& q = tokens.at(position);
  f.exact = window_matches(tokens, position, entity.name_tokens);
  const std::string q_stem = stem(q);
  double best_distance = 1.0;
  for (const std::string& t : entity.name_tokens) {
    if (t == q) f.partial = true;
    if (stem(t) == q_stem) f.lemma = true;
    best_distance = std::min(best_distance, normalized_levenshtein(q, t));
  }
  f.edit_similarity = 1.0 - best_distance;
  if (embed) {
    f.cosine = cosine(embed(q), mean_embedding(entity.name_tokens, embed));
  }
  return f;
}

double link_score(const LinkFeatures& f, const LinkingWeights& w) {
  return w.exact * (f.exact ? 1.0 : 0.0) + w.partial * (f.partial ? 1.0 : 0.0) +
         w.lemma * (f.lemma ? 1.0 : 0.0) + w.edit * f.edit_similarity + f.cosine;
}

Tensor build_linking_matrix(const std::vector<std::string>& tokens, const Schema& schema,
                            const WordEmbedder& embed, const LinkingWeights& weights) {
  if (tokens.empty()) throw UsageError("build_linking_matrix: empty question");
  if (schema.size() == 0) throw UsageError("build_linking_matrix: empty schema");
  if (!(weights.temperature > 0.0)) {
    throw UsageError("build_linking_matrix: temperature must be positive");
  }
  const std::size_t q = tokens.size(), v = schema.size();
  Tensor m({q, v});
  std::vector<double> scores(v);
  for (std::size_t i = 0; i < q; ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < v; ++j) {
      scores[j] = link_score(link_features(tokens, i, schema.entity(j), embed), weights) /
                  weights.temperature;
      top = std::max(top, scores[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < v; ++j) {
      scores[j] = std::exp(scores[j] - top);
      z += scores[j];
    }
    for (std::size_t j = 0; j < v; ++j) m.at(i, j) = scores[j] / z;
  }
  return m;
}

}  // namespace linkgate
