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

#ifndef UNISUM_EXTRACTOR_HPP_
#define UNISUM_EXTRACTOR_HPP_

#include <span>
#include <vector>

#include "corpus.hpp"
#include "diffcore.hpp"
#include "model.hpp"
#include "oracle.hpp"

namespace unisum {

// Sentence-level attention: one extraction probability per sentence, fixed
// for the whole decoding of an article.
Var score_sentences(Graph& g, const Model& model, const IndexedArticle& article);
std::vector<double> score_sentences(const Model& model, const IndexedArticle& article);
std::vector<std::vector<double>> score_batch(const Model& model, std::span<const IndexedArticle> articles);

// Sigmoid cross entropy averaged over sentences, logs clamped at 1e-12.
Var extractor_loss(Var beta, const LabelVector& labels);
double extractor_loss(std::span<const double> beta, const LabelVector& labels);

}  // namespace unisum

#endif  // UNISUM_EXTRACTOR_HPP_
