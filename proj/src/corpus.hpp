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

#ifndef UNISUM_CORPUS_HPP_
#define UNISUM_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace unisum {

using Tokens = std::vector<std::string>;

// Half-open token range [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

// A tokenized document. Sentence spans are ordered, disjoint and cover every
// token; sentence_of[m] is the index of the sentence containing token m.
struct Article {
  Tokens tokens;
  std::vector<Span> spans;
  std::vector<int> sentence_of;

  std::size_t num_tokens() const { return tokens.size(); }
  std::size_t num_sentences() const { return spans.size(); }
  Tokens sentence(std::size_t n) const;
};

struct SummaryPair {
  Article article;
  Tokens reference;
};

// Lowercases ASCII, splits on whitespace and detaches leading/trailing
// punctuation characters as single-character tokens.
Tokens tokenize(std::string_view text);

// Sentence boundaries fall after ".", "!" or "?" tokens; an unterminated tail
// becomes the last sentence.
Article segment(Tokens tokens);

// Builds an Article from explicit sentences (each must be nonempty).
Article from_sentences(const std::vector<Tokens>& sentences);

// Concatenates the given sentences (in the order given) into a new Article.
Article select_sentences(const Article& article, std::span<const int> indices);

struct TruncationLimits {
  std::size_t max_sentences = 50;
  std::size_t max_sentence_tokens = 50;
  std::size_t max_tokens = 400;
};

Article truncate(const Article& article, const TruncationLimits& limits);

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kStartId = 2;
inline constexpr int kStopId = 3;
inline constexpr int kNumReserved = 4;

class Vocab {
 public:
  Vocab();

  // Keeps the size-4 most frequent words; ties break lexicographically.
  static Vocab build(std::span<const SummaryPair> corpus, std::size_t size);
  static Vocab build_from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                 std::size_t size);

  // "word\tcount" per line, frequency-descending, reserved tokens omitted.
  void save(std::ostream& out) const;
  static Vocab load(std::istream& in);

  int size() const { return static_cast<int>(words_.size()); }
  int id(const std::string& word) const;  // kUnkId when absent
  bool contains(const std::string& word) const { return ids_.count(word) > 0; }
  const std::string& word(int id) const;
  std::int64_t count(int id) const { return counts_.at(static_cast<std::size_t>(id)); }

  bool operator==(const Vocab& other) const { return words_ == other.words_ && counts_ == other.counts_; }

 private:
  void add(const std::string& word, std::int64_t count);

  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, int> ids_;
};

// Word ids for one article. Out-of-vocabulary words get kUnkId in base_ids and
// per-article ids V, V+1, ... (first-appearance order) in extended_ids.
struct IndexedArticle {
  Article article;
  std::vector<int> base_ids;
  std::vector<int> extended_ids;
  Tokens oov_words;
  int vocab_size = 0;

  int extended_size() const { return vocab_size + static_cast<int>(oov_words.size()); }
};

IndexedArticle index_article(const Article& article, const Vocab& vocab);

// Extended ids of a reference sequence relative to an indexed article: words
// known to the vocabulary keep their id, article OOVs map to their extended
// id, everything else becomes kUnkId.
std::vector<int> index_reference(const Tokens& reference, const IndexedArticle& article,
                                 const Vocab& vocab);

// Maps extended ids back to words.
Tokens deindex(std::span<const int> ids, const IndexedArticle& article, const Vocab& vocab);

// JSON-lines corpus: one {"article": string, "summary": string} per line.
std::vector<SummaryPair> read_corpus(std::istream& in);
std::vector<SummaryPair> read_corpus_file(const std::string& path);
void write_corpus(std::ostream& out, std::span<const SummaryPair> corpus);

std::string join(const Tokens& tokens);

// Space-joined text with punctuation attached and sentence starts capitalized.
std::string detokenize(const Tokens& tokens);

}  // namespace unisum

#endif  // UNISUM_CORPUS_HPP_
