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

#ifndef UNISUM_MODEL_HPP_
#define UNISUM_MODEL_HPP_

#include <cstdint>
#include <string>

#include "corpus.hpp"
#include "diffcore.hpp"
#include "nn.hpp"

namespace unisum {

struct ModelDims {
  int vocab_size = 0;
  int embed_dim = 16;
  int ext_hidden = 32;
  int abs_hidden = 32;
  double init_scale = 0.1;

  bool operator==(const ModelDims&) const = default;
};

// Hierarchical bidirectional GRU sentence scorer.
struct ExtractorParams {
  int embedding = -1;
  GruParams word_fwd, word_bwd, sent_fwd, sent_bwd;
  int cls_w = -1, cls_b = -1;
};

// Pointer-generator with coverage.
struct AbstracterParams {
  int embedding = -1;
  LstmParams enc_fwd, enc_bwd, dec;
  int reduce_h_w = -1, reduce_h_b = -1, reduce_c_w = -1, reduce_c_b = -1;
  int attn_wh = -1, attn_ws = -1, attn_wc = -1, attn_b = -1, attn_v = -1;
  int out_w1 = -1, out_b1 = -1, out_w2 = -1, out_b2 = -1;
  int pgen_w = -1, pgen_b = -1;
};

inline constexpr const char* kExtractorPrefix = "extractor.";
inline constexpr const char* kAbstracterPrefix = "abstracter.";

// Both networks share one ParamSet; names carry an "extractor." or
// "abstracter." prefix.
class Model {
 public:
  Model(ModelDims dims, Vocab vocab, std::uint64_t seed);

  const ModelDims& dims() const { return dims_; }
  const Vocab& vocab() const { return vocab_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  const ExtractorParams& ext() const { return ext_; }
  const AbstracterParams& abs() const { return abs_; }

  static bool is_extractor_param(const std::string& name);
  static bool is_abstracter_param(const std::string& name);

 private:
  ModelDims dims_;
  Vocab vocab_;
  ParamSet params_;
  ExtractorParams ext_;
  AbstracterParams abs_;
};

}  // namespace unisum

#endif  // UNISUM_MODEL_HPP_
