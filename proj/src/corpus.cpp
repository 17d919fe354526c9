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

#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "common.hpp"
#include "json.hpp"

namespace unisum {

namespace {

const char* const kReservedWords[kNumReserved] = {"<pad>", "<unk>", "<s>", "</s>"};

bool is_punct(unsigned char c) { return c < 0x80 && std::ispunct(c); }

bool is_terminal(const std::string& token) { return token == "." || token == "!" || token == "?"; }

void rebuild_index(Article& a) {
  a.sentence_of.assign(a.tokens.size(), 0);
  for (std::size_t n = 0; n < a.spans.size(); ++n)
    for (std::size_t m = a.spans[n].begin; m < a.spans[n].end; ++m) a.sentence_of[m] = static_cast<int>(n);
}

}  // namespace

Tokens Article::sentence(std::size_t n) const {
  const Span& s = spans.at(n);
  return Tokens(tokens.begin() + static_cast<std::ptrdiff_t>(s.begin),
                tokens.begin() + static_cast<std::ptrdiff_t>(s.end));
}

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    std::string chunk(text.substr(i, j - i));
    for (auto& c : chunk)
      if (static_cast<unsigned char>(c) < 0x80) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::size_t lo = 0, hi = chunk.size();
    while (lo < hi && is_punct(static_cast<unsigned char>(chunk[lo]))) {
      out.emplace_back(1, chunk[lo]);
      ++lo;
    }
    std::size_t tail = hi;
    while (tail > lo && is_punct(static_cast<unsigned char>(chunk[tail - 1]))) --tail;
    if (tail > lo) out.push_back(chunk.substr(lo, tail - lo));
    for (std::size_t k = tail; k < hi; ++k) out.emplace_back(1, chunk[k]);
    i = j;
  }
  return out;
}

Article segment(Tokens tokens) {
  Article a;
  a.tokens = std::move(tokens);
  std::size_t begin = 0;
  for (std::size_t m = 0; m < a.tokens.size(); ++m) {
    if (is_terminal(a.tokens[m])) {
      a.spans.push_back({begin, m + 1});
      begin = m + 1;
    }
  }
  if (begin < a.tokens.size()) a.spans.push_back({begin, a.tokens.size()});
  rebuild_index(a);
  return a;
}

Article from_sentences(const std::vector<Tokens>& sentences) {
  Article a;
  for (const auto& s : sentences) {
    if (s.empty()) throw DataError("from_sentences: empty sentence");
    std::size_t begin = a.tokens.size();
    a.tokens.insert(a.tokens.end(), s.begin(), s.end());
    a.spans.push_back({begin, a.tokens.size()});
  }
  rebuild_index(a);
  return a;
}

Article select_sentences(const Article& article, std::span<const int> indices) {
  std::vector<Tokens> sentences;
  sentences.reserve(indices.size());
  for (int n : indices) sentences.push_back(article.sentence(static_cast<std::size_t>(n)));
  return from_sentences(sentences);
}

Article truncate(const Article& article, const TruncationLimits& limits) {
  std::vector<Tokens> sentences;
  std::size_t total = 0;
  for (std::size_t n = 0; n < article.num_sentences() && n < limits.max_sentences; ++n) {
    if (total >= limits.max_tokens) break;
    Tokens s = article.sentence(n);
    std::size_t keep = std::min({s.size(), limits.max_sentence_tokens, limits.max_tokens - total});
    if (keep == 0) continue;
    s.resize(keep);
    total += keep;
    sentences.push_back(std::move(s));
  }
  return from_sentences(sentences);
}

Vocab::Vocab() {
  for (int i = 0; i < kNumReserved; ++i) add(kReservedWords[i], 0);
}

void Vocab::add(const std::string& word, std::int64_t count) {
  ids_.emplace(word, static_cast<int>(words_.size()));
  words_.push_back(word);
  counts_.push_back(count);
}

Vocab Vocab::build_from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                               std::size_t size) {
  if (size <= static_cast<std::size_t>(kNumReserved))
    throw ConfigError("vocabulary size " + std::to_string(size) + " must exceed the " +
                      std::to_string(kNumReserved) + " reserved tokens");
  std::vector<std::pair<std::string, std::int64_t>> sorted;
  sorted.reserve(counts.size());
  for (const auto& [w, c] : counts) {
    bool reserved = false;
    for (const char* r : kReservedWords) reserved = reserved || w == r;
    if (!reserved) sorted.emplace_back(w, c);
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocab v;
  std::size_t room = size - kNumReserved;
  for (std::size_t i = 0; i < sorted.size() && i < room; ++i) v.add(sorted[i].first, sorted[i].second);
  return v;
}

Vocab Vocab::build(std::span<const SummaryPair> corpus, std::size_t size) {
  if (corpus.empty()) throw ConfigError("cannot build a vocabulary from an empty corpus");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& pair : corpus) {
    for (const auto& w : pair.article.tokens) ++counts[w];
    for (const auto& w : pair.reference) ++counts[w];
  }
  return build_from_counts(counts, size);
}

int Vocab::id(const std::string& word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocab::word(int id) const {
  if (id < 0 || id >= size()) throw DataError("vocabulary id " + std::to_string(id) + " out of range");
  return words_[static_cast<std::size_t>(id)];
}

void Vocab::save(std::ostream& out) const {
  for (std::size_t i = kNumReserved; i < words_.size(); ++i) out << words_[i] << '\t' << counts_[i] << '\n';
}

Vocab Vocab::load(std::istream& in) {
  Vocab v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("vocab line " + std::to_string(lineno) + ": missing tab");
    std::string word = line.substr(0, tab);
    std::int64_t count = 0;
    try {
      count = std::stoll(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw DataError("vocab line " + std::to_string(lineno) + ": bad count");
    }
    if (v.contains(word)) throw DataError("vocab line " + std::to_string(lineno) + ": duplicate word " + word);
    v.add(word, count);
  }
  return v;
}

IndexedArticle index_article(const Article& article, const Vocab& vocab) {
  IndexedArticle ia;
  ia.article = article;
  ia.vocab_size = vocab.size();
  std::map<std::string, int> oov_ids;
  ia.base_ids.reserve(article.tokens.size());
  ia.extended_ids.reserve(article.tokens.size());
  for (const auto& w : article.tokens) {
    if (vocab.contains(w)) {
      int id = vocab.id(w);
      ia.base_ids.push_back(id);
      ia.extended_ids.push_back(id);
      continue;
    }
    auto [it, inserted] = oov_ids.emplace(w, vocab.size() + static_cast<int>(ia.oov_words.size()));
    if (inserted) ia.oov_words.push_back(w);
    ia.base_ids.push_back(kUnkId);
    ia.extended_ids.push_back(it->second);
  }
  return ia;
}

std::vector<int> index_reference(const Tokens& reference, const IndexedArticle& article, const Vocab& vocab) {
  std::vector<int> ids;
  ids.reserve(reference.size());
  for (const auto& w : reference) {
    if (vocab.contains(w)) {
      ids.push_back(vocab.id(w));
      continue;
    }
    auto it = std::find(article.oov_words.begin(), article.oov_words.end(), w);
    ids.push_back(it == article.oov_words.end() ? kUnkId
                                                : vocab.size() + static_cast<int>(it - article.oov_words.begin()));
  }
  return ids;
}

Tokens deindex(std::span<const int> ids, const IndexedArticle& article, const Vocab& vocab) {
  Tokens out;
  out.reserve(ids.size());
  for (int id : ids) {
    if (id < vocab.size()) {
      out.push_back(vocab.word(id));
    } else {
      std::size_t k = static_cast<std::size_t>(id - vocab.size());
      if (k >= article.oov_words.size()) throw DataError("extended id " + std::to_string(id) + " out of range");
      out.push_back(article.oov_words[k]);
    }
  }
  return out;
}

std::vector<SummaryPair> read_corpus(std::istream& in) {
  std::vector<SummaryPair> corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("article") || !rec.contains("summary") || !rec["article"].is_string() ||
        !rec["summary"].is_string())
      throw DataError("corpus line " + std::to_string(lineno) + ": expected string fields \"article\" and \"summary\"");
    Tokens article_tokens = tokenize(rec["article"].get<std::string>());
    Tokens summary_tokens = tokenize(rec["summary"].get<std::string>());
    if (article_tokens.empty()) throw DataError("corpus line " + std::to_string(lineno) + ": empty article");
    if (summary_tokens.empty()) throw DataError("corpus line " + std::to_string(lineno) + ": empty summary");
    corpus.push_back({segment(std::move(article_tokens)), std::move(summary_tokens)});
  }
  return corpus;
}

std::vector<SummaryPair> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path);
  return read_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const SummaryPair> corpus) {
  for (const auto& pair : corpus) {
    nlohmann::json rec;
    rec["article"] = join(pair.article.tokens);
    rec["summary"] = join(pair.reference);
    out << rec.dump() << '\n';
  }
}

std::string join(const Tokens& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i];
  }
  return s;
}

std::string detokenize(const Tokens& tokens) {
  std::string s;
  bool sentence_start = true;
  for (const auto& tok : tokens) {
    bool punct = tok.size() == 1 && is_punct(static_cast<unsigned char>(tok[0]));
    if (!s.empty() && !punct) s += ' ';
    std::string w = tok;
    if (sentence_start && !punct && !w.empty() && static_cast<unsigned char>(w[0]) < 0x80)
      w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    if (!punct) sentence_start = false;
    if (is_terminal(tok)) sentence_start = true;
    s += w;
  }
  return s;
}

}  // namespace unisum
