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

#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "common.hpp"
#include "oracle.hpp"

namespace unisum {

namespace {

constexpr const char* kConsonants = "bdfgklmnprstvz";
constexpr const char* kVowels = "aeiou";
constexpr int kSyllables = 14 * 5;

std::string syllable(int i) { return {kConsonants[i / 5], kVowels[i % 5]}; }

bool has_synonym(int i, const SynthConfig& c) {
  return i < static_cast<int>(std::lround(c.synonym_fraction * c.content_words));
}

enum class Kind { kSalient, kDistractor, kFiller };

struct Slot {
  Kind kind;
  int source;  // salient index for salient/distractor, filler index otherwise
};

}  // namespace

const std::vector<std::string>& cue_words() {
  static const std::vector<std::string> words{"officials", "announced", "confirmed"};
  return words;
}

const std::vector<std::string>& neutral_words() {
  static const std::vector<std::string> words{"perhaps", "someone", "rumors"};
  return words;
}

std::string content_word(int i) {
  std::string w = syllable(i % kSyllables) + syllable((i / kSyllables) % kSyllables);
  if (i >= kSyllables * kSyllables) w += syllable(i / (kSyllables * kSyllables) % kSyllables);
  return w;
}

std::string synonym_word(int i) { return content_word(i) + "n"; }

void SynthConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("synthetic corpus: " + m); };
  if (num_records < 1) fail("num_records must be positive");
  if (min_sentences < 1 || max_sentences < min_sentences) fail("need 1 <= min_sentences <= max_sentences");
  if (min_sentence_len < 1 || max_sentence_len < min_sentence_len)
    fail("need 1 <= min_sentence_len <= max_sentence_len");
  if (min_salient < 1 || max_salient < min_salient) fail("need 1 <= min_salient <= max_salient");
  if (min_salient > min_sentences) fail("min_salient exceeds min_sentences");
  if (synonym_fraction < 0.0 || synonym_fraction > 1.0) fail("synonym_fraction must lie in [0,1]");
  if (distractor_prob < 0.0 || distractor_prob > 1.0) fail("distractor_prob must lie in [0,1]");
  if (content_words < max_sentences * max_sentence_len)
    fail("content_words must be at least max_sentences * max_sentence_len");
}

nlohmann::json SynthConfig::to_json() const {
  return {{"num_records", num_records},         {"content_words", content_words},
          {"synonym_fraction", synonym_fraction}, {"min_sentences", min_sentences},
          {"max_sentences", max_sentences},     {"min_sentence_len", min_sentence_len},
          {"max_sentence_len", max_sentence_len}, {"min_salient", min_salient},
          {"max_salient", max_salient},         {"distractor_prob", distractor_prob}};
}

SynthConfig SynthConfig::from_json(const nlohmann::json& j, SynthConfig c) {
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "num_records") c.num_records = value.get<int>();
      else if (key == "content_words") c.content_words = value.get<int>();
      else if (key == "synonym_fraction") c.synonym_fraction = value.get<double>();
      else if (key == "min_sentences") c.min_sentences = value.get<int>();
      else if (key == "max_sentences") c.max_sentences = value.get<int>();
      else if (key == "min_sentence_len") c.min_sentence_len = value.get<int>();
      else if (key == "max_sentence_len") c.max_sentence_len = value.get<int>();
      else if (key == "min_salient") c.min_salient = value.get<int>();
      else if (key == "max_salient") c.max_salient = value.get<int>();
      else if (key == "distractor_prob") c.distractor_prob = value.get<double>();
      else throw ConfigError("synthetic corpus: unknown field " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synthetic corpus config: ") + e.what());
  }
  return c;
}

constexpr int kMaxAttempts = 1000;

std::vector<SyntheticRecord> generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto pick = [&](const std::vector<std::string>& words) {
    return words[static_cast<std::size_t>(uniform(0, static_cast<int>(words.size()) - 1))];
  };

  std::vector<int> pool(static_cast<std::size_t>(config.content_words));
  std::vector<SyntheticRecord> out;
  out.reserve(static_cast<std::size_t>(config.num_records));
  // Records whose oracle labels disagree with the markers are redrawn; this
  // happens when a distractor's final "." lines up with another reference
  // sentence and the greedy labeler keeps it.
  auto agrees = [](const SyntheticRecord& rec) {
    LabelVector marks(rec.pair.article.num_sentences(), 0);
    for (int s : rec.salient) marks[static_cast<std::size_t>(s)] = 1;
    return extract_labels(rec.pair.article, rec.pair.reference) == marks;
  };
  for (int r = 0; r < config.num_records; ++r) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxAttempts) throw ConfigError("synthetic settings rarely yield oracle-consistent records");
      const int n = uniform(config.min_sentences, config.max_sentences);
      const int salient = uniform(config.min_salient, std::min(config.max_salient, n));
      int distractors = 0;
      std::vector<Slot> slots;
      for (int i = 0; i < salient; ++i) {
        slots.push_back({Kind::kSalient, i});
        if (salient + distractors < n && std::bernoulli_distribution(config.distractor_prob)(rng)) {
          slots.push_back({Kind::kDistractor, i});
          ++distractors;
        }
      }
      const int fillers = n - salient - distractors;
      for (int i = 0; i < fillers; ++i) slots.push_back({Kind::kFiller, i});
      std::shuffle(slots.begin(), slots.end(), rng);

      std::iota(pool.begin(), pool.end(), 0);
      std::shuffle(pool.begin(), pool.end(), rng);
      std::size_t next = 0;
      auto draw = [&](int len) {
        std::vector<int> ids(pool.begin() + static_cast<std::ptrdiff_t>(next),
                             pool.begin() + static_cast<std::ptrdiff_t>(next) + len);
        next += static_cast<std::size_t>(len);
        return ids;
      };
      std::vector<std::vector<int>> salient_words, filler_words;
      std::vector<std::string> cues;
      for (int i = 0; i < salient; ++i) {
        salient_words.push_back(draw(uniform(config.min_sentence_len, config.max_sentence_len)));
        cues.push_back(pick(cue_words()));
      }
      for (int i = 0; i < fillers; ++i) filler_words.push_back(draw(uniform(config.min_sentence_len, config.max_sentence_len)));

      SyntheticRecord rec;
      std::vector<Tokens> sentences;
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const Slot& slot = slots[s];
        Tokens sent;
        const auto src = static_cast<std::size_t>(slot.source);
        if (slot.kind == Kind::kSalient) {
          sent.push_back(cues[src]);
          rec.salient.push_back(static_cast<int>(s));
        } else if (slot.kind == Kind::kDistractor) {
          sent.push_back(pick(neutral_words()));
          rec.distractor.push_back(static_cast<int>(s));
        }
        const auto& words = slot.kind == Kind::kFiller ? filler_words[src] : salient_words[src];
        for (int w : words) sent.push_back(content_word(w));
        sent.push_back(".");
        sentences.push_back(std::move(sent));

        if (slot.kind == Kind::kSalient) {
          rec.pair.reference.push_back(cues[src]);
          for (int w : words) rec.pair.reference.push_back(has_synonym(w, config) ? synonym_word(w) : content_word(w));
          rec.pair.reference.push_back(".");
        }
      }
      rec.pair.article = from_sentences(sentences);
      if (!agrees(rec)) continue;
      out.push_back(std::move(rec));
      break;
    }
  }
  return out;
}

std::vector<SummaryPair> pairs_of(const std::vector<SyntheticRecord>& records) {
  std::vector<SummaryPair> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.pair);
  return out;
}

}  // namespace unisum
