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

#ifndef UNISUM_EVALUATE_HPP_
#define UNISUM_EVALUATE_HPP_

#include <span>
#include <string>
#include <vector>

#include "checkpoint.hpp"
#include "corpus.hpp"
#include "json.hpp"

namespace unisum {

// How the abstracter input is formed at test time.
//   unified    whole article, word attention fused with beta
//   two-stage  only sentences with beta above the threshold, no fusion
//   abstracter whole article, no fusion
enum class DecodeMode { kUnified, kTwoStage, kAbstracter };

const char* mode_name(DecodeMode m);
DecodeMode parse_mode(const std::string& name);

struct Summary {
  Tokens tokens;
  std::vector<double> beta;                      // over the truncated article sentences
  std::vector<std::vector<double>> raw_attention;  // per decoder step, over the abstracter input
  std::vector<int> source_sentences;             // article sentences fed to the abstracter
  std::vector<int> sentence_of;                  // abstracter input word -> article sentence
};

Summary summarize(const Checkpoint& ckpt, const Article& article, DecodeMode mode);
std::vector<Summary> summarize_corpus(const Checkpoint& ckpt, std::span<const SummaryPair> corpus, DecodeMode mode);

// MetricsReport:
//   extractive   ROUGE-1/2/L recall of beta > threshold sentences, label accuracy
//   oracle       the same recall for the oracle-labeled sentences
//   abstractive  ROUGE-1/2/L F1 of decoded summaries
//   inconsistency  mean and per-article rate (unified and abstracter modes)
// All averages are over records.
nlohmann::json evaluate(const Checkpoint& ckpt, std::span<const SummaryPair> corpus, DecodeMode mode);

}  // namespace unisum

#endif  // UNISUM_EVALUATE_HPP_
