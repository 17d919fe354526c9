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

#ifndef UNISUM_ABSTRACTER_HPP_
#define UNISUM_ABSTRACTER_HPP_

#include <optional>
#include <span>
#include <vector>

#include "corpus.hpp"
#include "diffcore.hpp"
#include "model.hpp"
#include "nn.hpp"

namespace unisum {

struct EncoderOutput {
  Var states;         // [M, 2H] concatenated forward/backward outputs
  Var features;       // [M, A] states * W_h + b, reused by every attention step
  LstmState initial;  // decoder start state, linear in the final encoder states
};

EncoderOutput encode(Graph& g, const Model& model, const IndexedArticle& article);

// e_m = v . tanh(W_h h_m + W_s s_t + w_c c_m + b), alpha = softmax(e).
// The coverage term is skipped when `coverage` is invalid.
Var raw_attention(Graph& g, const Model& model, const EncoderOutput& enc, Var decoder_h, Var coverage);

struct StepOutput {
  Var final_dist;  // over vocab_size + |oov| extended ids
  Var vocab_dist;
  Var p_gen;
  Var context;
};

// Given the decoder state, its input embedding and the (fused) attention,
// builds the copy/generate mixture over the extended vocabulary.
StepOutput decode_step(Graph& g, const Model& model, const EncoderOutput& enc, const IndexedArticle& article,
                       Var decoder_h, Var input_embedding, Var attention,
                       std::optional<double> forced_p_gen = std::nullopt);

// -(1/T) sum_t log P_t[target_t], log clamped at 1e-12.
Var nll_loss(std::span<const Var> finals, std::span<const int> targets);
double nll_loss(std::span<const std::vector<double>> finals, std::span<const int> targets);

// (1/T) sum_t sum_m min(a_t[m], c_t[m]) with c_1 = 0 and c_{t+1} = c_t + a_t.
Var coverage_loss(std::span<const Var> attentions);
double coverage_loss(std::span<const std::vector<double>> attentions,
                     std::vector<std::vector<double>>* coverage = nullptr);

struct TeacherForced {
  Var nll;
  Var coverage;
  std::vector<Var> raw_attention;
  std::vector<Var> fused_attention;
  std::vector<Var> finals;
};

// Runs the decoder over targets (extended ids, ending in STOP). When `beta`
// is valid, each step's word attention is fused with it; the coverage vector
// accumulates the attention actually used. `use_coverage` feeds coverage into
// the attention scores.
TeacherForced teacher_forced(Graph& g, const Model& model, const IndexedArticle& article,
                             std::span<const int> targets, Var beta, bool use_coverage);

struct DecodeOptions {
  int max_len = 120;
  int beam_width = 1;
  bool use_coverage = false;
};

struct DecodeResult {
  std::vector<int> ids;  // extended ids, STOP excluded
  Tokens tokens;
  std::vector<std::vector<double>> raw_attention;
  std::vector<std::vector<double>> fused_attention;
};

// Greedy (beam_width 1) or beam decoding; beta empty means no fusion.
DecodeResult decode(const Model& model, const IndexedArticle& article, std::span<const double> beta,
                    const DecodeOptions& options);

// Decoder-side id for a (possibly extended) id: OOVs read the UNK embedding.
inline int input_id(int extended_id, int vocab_size) { return extended_id >= vocab_size ? kUnkId : extended_id; }

}  // namespace unisum

#endif  // UNISUM_ABSTRACTER_HPP_
