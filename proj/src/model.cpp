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

#include "model.hpp"

#include "common.hpp"

namespace unisum {

Model::Model(ModelDims dims, Vocab vocab, std::uint64_t seed) : dims_(dims), vocab_(std::move(vocab)) {
  if (dims_.vocab_size != vocab_.size())
    throw ConfigError("model vocab_size " + std::to_string(dims_.vocab_size) + " differs from vocabulary size " +
                      std::to_string(vocab_.size()));
  if (dims_.embed_dim < 1 || dims_.ext_hidden < 1 || dims_.abs_hidden < 1)
    throw ConfigError("model dimensions must be positive");
  Initializer init(seed, dims_.init_scale);
  const int V = dims_.vocab_size, E = dims_.embed_dim, He = dims_.ext_hidden, H = dims_.abs_hidden;
  const std::string x = kExtractorPrefix;
  ext_.embedding = params_.add(x + "embedding", init.uniform(Shape::mat(V, E)));
  ext_.word_fwd = GruParams::create(params_, init, x + "word_fwd", E, He);
  ext_.word_bwd = GruParams::create(params_, init, x + "word_bwd", E, He);
  ext_.sent_fwd = GruParams::create(params_, init, x + "sent_fwd", 2 * He, He);
  ext_.sent_bwd = GruParams::create(params_, init, x + "sent_bwd", 2 * He, He);
  ext_.cls_w = params_.add(x + "cls_w", init.uniform(Shape::vec(2 * He)));
  ext_.cls_b = params_.add(x + "cls_b", init.uniform(Shape::vec(1)));

  const std::string a = kAbstracterPrefix;
  const int A = 2 * H;
  abs_.embedding = params_.add(a + "embedding", init.uniform(Shape::mat(V, E)));
  abs_.enc_fwd = LstmParams::create(params_, init, a + "enc_fwd", E, H);
  abs_.enc_bwd = LstmParams::create(params_, init, a + "enc_bwd", E, H);
  abs_.dec = LstmParams::create(params_, init, a + "dec", E + 2 * H, H);
  abs_.reduce_h_w = params_.add(a + "reduce_h_w", init.uniform(Shape::mat(2 * H, H)));
  abs_.reduce_h_b = params_.add(a + "reduce_h_b", init.uniform(Shape::vec(H)));
  abs_.reduce_c_w = params_.add(a + "reduce_c_w", init.uniform(Shape::mat(2 * H, H)));
  abs_.reduce_c_b = params_.add(a + "reduce_c_b", init.uniform(Shape::vec(H)));
  abs_.attn_wh = params_.add(a + "attn_wh", init.uniform(Shape::mat(2 * H, A)));
  abs_.attn_ws = params_.add(a + "attn_ws", init.uniform(Shape::mat(H, A)));
  abs_.attn_wc = params_.add(a + "attn_wc", init.uniform(Shape::mat(1, A)));
  abs_.attn_b = params_.add(a + "attn_b", init.uniform(Shape::vec(A)));
  abs_.attn_v = params_.add(a + "attn_v", init.uniform(Shape::vec(A)));
  abs_.out_w1 = params_.add(a + "out_w1", init.uniform(Shape::mat(3 * H, H)));
  abs_.out_b1 = params_.add(a + "out_b1", init.uniform(Shape::vec(H)));
  abs_.out_w2 = params_.add(a + "out_w2", init.uniform(Shape::mat(H, V)));
  abs_.out_b2 = params_.add(a + "out_b2", init.uniform(Shape::vec(V)));
  abs_.pgen_w = params_.add(a + "pgen_w", init.uniform(Shape::mat(3 * H + E, 1)));
  abs_.pgen_b = params_.add(a + "pgen_b", init.uniform(Shape::vec(1)));
}

bool Model::is_extractor_param(const std::string& name) { return name.rfind(kExtractorPrefix, 0) == 0; }

bool Model::is_abstracter_param(const std::string& name) { return name.rfind(kAbstracterPrefix, 0) == 0; }

}  // namespace unisum
