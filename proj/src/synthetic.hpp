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

#ifndef UNISUM_SYNTHETIC_HPP_
#define UNISUM_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "json.hpp"

namespace unisum {

// Desk-scale stand-in for a news corpus. Every article mixes three kinds of
// sentences:
//   salient     cue word + content words + "."
//   distractor  the same content as a salient sentence, cue replaced by a
//               neutral word
//   filler      unrelated content words + "."
// The reference is the salient sentences in article order with every content
// word that has a synonym replaced by it. Synonyms never occur in articles.
// Records are redrawn until the oracle labels equal the salient markers.
struct SynthConfig {
  int num_records = 1000;
  int content_words = 160;
  double synonym_fraction = 0.1;
  int min_sentences = 4;
  int max_sentences = 6;
  int min_sentence_len = 4;  // content words per sentence
  int max_sentence_len = 6;
  int min_salient = 1;
  int max_salient = 2;
  double distractor_prob = 0.5;

  void validate() const;
  nlohmann::json to_json() const;
  static SynthConfig from_json(const nlohmann::json& j, SynthConfig base);
};

struct SyntheticRecord {
  SummaryPair pair;
  std::vector<int> salient;     // sentence indices
  std::vector<int> distractor;  // sentence indices
};

std::vector<SyntheticRecord> generate_synthetic(const SynthConfig& config, std::uint64_t seed);

std::vector<SummaryPair> pairs_of(const std::vector<SyntheticRecord>& records);

const std::vector<std::string>& cue_words();
const std::vector<std::string>& neutral_words();
// Content word i and its synonym (empty when it has none).
std::string content_word(int i);
std::string synonym_word(int i);

}  // namespace unisum

#endif  // UNISUM_SYNTHETIC_HPP_
