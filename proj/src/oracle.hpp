// Copyright 2026 The unisum Authors.
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

#ifndef UNISUM_ORACLE_HPP_
#define UNISUM_ORACLE_HPP_

#include <span>
#include <vector>

#include "corpus.hpp"

namespace unisum {

// Ground-truth extraction labels, one 0/1 entry per sentence.
using LabelVector = std::vector<int>;

// ROUGE-L recall of the selected sentences, concatenated in article order,
// against the reference.
double informativity(std::span<const int> selected, const Article& article, const Tokens& reference);

// Greedy high-recall labeling: rank sentences by their own informativity
// (descending, earlier sentence wins ties) and keep each one that strictly
// raises the informativity of the running selection.
LabelVector extract_labels(const Article& article, const Tokens& reference);

std::vector<int> selected_indices(const LabelVector& labels);

}  // namespace unisum

#endif  // UNISUM_ORACLE_HPP_
