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
#include <string>
#include <string_view>
#include <vector>

namespace linkgate {

// Lowercased alphanumeric runs; everything else separates tokens.
std::vector<std::string> tokenize_question(std::string_view text);

// Splits a schema identifier on '_', spaces and camelCase boundaries, lowercased.
std::vector<std::string> split_name(std::string_view name);

std::string to_lower(std::string_view s);

// Suffix stripper: ies->y; es after s/x/z/ch/sh; s (not ss); ing; ed.
std::string stem(std::string_view word);

std::size_t levenshtein(std::string_view a, std::string_view b);

// levenshtein / max(length), 0 for two empty strings.
double normalized_levenshtein(std::string_view a, std::string_view b);

}  // namespace linkgate
