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

#ifndef UNISUM_ROUGE_HPP_
#define UNISUM_ROUGE_HPP_

#include <cstddef>
#include <span>
#include <string>

namespace unisum {

struct RougeScore {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

// Full-length scores over flat token sequences; no stemming, no stopwords.
// A side with no n-grams scores 0 for the component that divides by it.
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference, int n);
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// f1 = 2pr/(p+r), 0 when p+r == 0.
RougeScore make_score(std::size_t hits, std::size_t reference_count, std::size_t candidate_count);

}  // namespace unisum

#endif  // UNISUM_ROUGE_HPP_
