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

#include "unisum/unisum.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "checkpoint.hpp"
#include "common.hpp"
#include "evaluate.hpp"
#include "gradcheck.hpp"
#include "json.hpp"
#include "oracle.hpp"
#include "rouge.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

struct usum_corpus {
  std::vector<unisum::SummaryPair> pairs;
  std::vector<unisum::LabelVector> labels;  // empty or aligned with pairs
};

struct usum_model {
  unisum::Checkpoint ckpt;
};

namespace {

using nlohmann::json;
using namespace unisum;

thread_local std::string g_last_error;
thread_local usum_progress_fn g_progress = nullptr;
thread_local void* g_progress_user = nullptr;

usum_status fail(usum_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs body, mapping exceptions onto status codes.
template <typename F>
usum_status guarded(F&& body) {
  try {
    body();
    return USUM_OK;
  } catch (const ConfigError& e) {
    return fail(USUM_ERR_CONFIG, e.what());
  } catch (const DataError& e) {
    return fail(USUM_ERR_DATA, e.what());
  } catch (const NumericError& e) {
    return fail(USUM_ERR_NUMERIC, e.what());
  } catch (const json::exception& e) {
    return fail(USUM_ERR_CONFIG, std::string("invalid JSON: ") + e.what());
  } catch (const std::exception& e) {
    return fail(USUM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(USUM_ERR_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (!p) throw ConfigError(std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_optional(const char* text) {
  if (!text || !*text) return json::object();
  json j = json::parse(text);
  if (!j.is_object()) throw ConfigError("expected a JSON object");
  return j;
}

std::vector<LabelVector> parse_labels(const std::string& jsonl) {
  std::vector<LabelVector> out;
  std::istringstream in(jsonl);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line).at("labels").get<LabelVector>());
    } catch (const json::exception& e) {
      throw DataError("labels line " + std::to_string(no) + ": " + e.what());
    }
  }
  return out;
}

json parts_json(const LossParts& p) {
  return {{"total", p.total}, {"ext", p.ext}, {"abs", p.abs}, {"cov", p.cov}, {"inc", p.inc}};
}

// Copy of the checkpoint with decoding options applied.
Checkpoint with_options(const Checkpoint& ckpt, const json& options, DecodeMode& mode) {
  Checkpoint out = ckpt;
  json overrides = json::object();
  for (const auto& [key, value] : options.items()) {
    if (key == "mode") {
      mode = parse_mode(value.get<std::string>());
    } else if (key == "max_len" || key == "beam_width" || key == "beta_threshold") {
      overrides[key] = value;
    } else {
      throw ConfigError("unknown decoding option '" + key + "'");
    }
  }
  out.config = TrainConfig::from_json(overrides, out.config);
  return out;
}

}  // namespace

extern "C" {

const char* usum_version(void) { return "1.0.0"; }

const char* usum_last_error(void) { return g_last_error.c_str(); }

void usum_string_free(char* s) { std::free(s); }

void usum_set_warnings(int enabled) { set_warnings_enabled(enabled != 0); }

usum_status usum_config_resolve(const char* preset, const char* overrides_json, char** out_json,
                                char** out_fingerprint) {
  return guarded([&] {
    TrainConfig c = TrainConfig::preset_named(preset ? preset : "desk");
    c = TrainConfig::from_json(parse_optional(overrides_json), c);
    if (out_json) *out_json = dup(c.to_json().dump(2));
    if (out_fingerprint) *out_fingerprint = dup(c.fingerprint());
  });
}

usum_status usum_fingerprint(const char* json_text, char** out_fingerprint) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out_fingerprint, "out_fingerprint");
    *out_fingerprint = dup(fingerprint(json::parse(json_text).dump()));
  });
}

void usum_set_progress(usum_progress_fn fn, void* user) {
  g_progress = fn;
  g_progress_user = user;
}

usum_status usum_corpus_load(const char* path, usum_corpus** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new usum_corpus{read_corpus_file(path), {}};
  });
}

usum_status usum_corpus_parse(const char* jsonl, usum_corpus** out) {
  return guarded([&] {
    need(jsonl, "jsonl");
    need(out, "out");
    std::istringstream in(jsonl);
    *out = new usum_corpus{read_corpus(in), {}};
  });
}

usum_status usum_corpus_generate(const char* settings_json, uint64_t seed, usum_corpus** out) {
  return guarded([&] {
    need(out, "out");
    SynthConfig sc = SynthConfig::from_json(parse_optional(settings_json), SynthConfig{});
    *out = new usum_corpus{pairs_of(generate_synthetic(sc, seed)), {}};
  });
}

usum_status usum_corpus_save(const usum_corpus* corpus, const char* path) {
  return guarded([&] {
    need(corpus, "corpus");
    need(path, "path");
    std::ofstream f(path);
    if (!f) throw DataError(std::string("cannot open ") + path + " for writing");
    write_corpus(f, corpus->pairs);
  });
}

usum_status usum_corpus_size(const usum_corpus* corpus, size_t* out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(out, "out");
    *out = corpus->pairs.size();
  });
}

usum_status usum_corpus_slice(const usum_corpus* corpus, size_t begin, size_t end, usum_corpus** out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(out, "out");
    if (begin > end || end > corpus->pairs.size()) throw ConfigError("slice bounds out of range");
    auto* c = new usum_corpus;
    c->pairs.assign(corpus->pairs.begin() + static_cast<std::ptrdiff_t>(begin),
                    corpus->pairs.begin() + static_cast<std::ptrdiff_t>(end));
    if (!corpus->labels.empty())
      c->labels.assign(corpus->labels.begin() + static_cast<std::ptrdiff_t>(begin),
                       corpus->labels.begin() + static_cast<std::ptrdiff_t>(end));
    *out = c;
  });
}

void usum_corpus_free(usum_corpus* corpus) { delete corpus; }

usum_status usum_make_labels(const usum_corpus* corpus, char** out_jsonl) {
  return guarded([&] {
    need(corpus, "corpus");
    need(out_jsonl, "out_jsonl");
    std::string text;
    for (const auto& pair : corpus->pairs)
      text += json{{"labels", extract_labels(pair.article, pair.reference)}}.dump() + "\n";
    *out_jsonl = dup(text);
  });
}

usum_status usum_corpus_set_labels(usum_corpus* corpus, const char* labels_jsonl) {
  return guarded([&] {
    need(corpus, "corpus");
    need(labels_jsonl, "labels_jsonl");
    auto labels = parse_labels(labels_jsonl);
    if (labels.size() != corpus->pairs.size())
      throw DataError("got " + std::to_string(labels.size()) + " label lines for " +
                      std::to_string(corpus->pairs.size()) + " records");
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i].size() != corpus->pairs[i].article.num_sentences())
        throw DataError("labels line " + std::to_string(i + 1) + " does not match the sentence count");
    corpus->labels = std::move(labels);
  });
}

usum_status usum_train(const char* config_json, const usum_corpus* train, const usum_corpus* valid,
                       const usum_model* init, const usum_model* abs_init, usum_model** out, char** out_log) {
  return guarded([&] {
    need(config_json, "config_json");
    need(train, "train");
    need(out, "out");
    const TrainConfig config = TrainConfig::from_json(json::parse(config_json), TrainConfig{});
    if ((config.regime == Regime::kTwoStage || config.regime == Regime::kEnd2End) && !init)
      throw ConfigError(std::string(regime_name(config.regime)) + " training needs a pretrained model");

    std::vector<SummaryPair> train_pairs = train->pairs, valid_pairs;
    std::vector<LabelVector> train_labels = train->labels, valid_labels;
    if (valid) {
      valid_pairs = valid->pairs;
      valid_labels = valid->labels;
    } else {
      auto [t, v] = split_corpus(train->pairs, config.valid_fraction);
      train_pairs = std::move(t);
      valid_pairs = std::move(v);
      if (!train_labels.empty()) {
        valid_labels.assign(train_labels.begin() + static_cast<std::ptrdiff_t>(train_pairs.size()), train_labels.end());
        train_labels.resize(train_pairs.size());
      }
    }

    auto model = std::make_unique<usum_model>(
        usum_model{start_run(config, train_pairs, init ? &init->ckpt : nullptr, abs_init ? &abs_init->ckpt : nullptr)});
    const auto train_ex = prepare_examples(model->ckpt, train_pairs, train_labels);
    const auto valid_ex = prepare_examples(model->ckpt, valid_pairs, valid_labels);
    Trainer trainer(model->ckpt, train_ex, valid_ex);
    TrainHooks hooks;
    if (g_progress)
      hooks.on_eval = [](const EvalPoint& e) {
        g_progress(json{{"iteration", e.iteration}, {"valid", parts_json(e.parts)}}.dump().c_str(), g_progress_user);
      };
    const TrainSummary s = trainer.run(hooks);

    if (out_log) {
      json log;
      log["fingerprint"] = config.fingerprint();
      log["regime"] = regime_name(config.regime);
      log["train_records"] = train_ex.size();
      log["valid_records"] = valid_ex.size();
      log["iterations"] = model->ckpt.iteration;
      log["evals"] = json::array();
      for (const auto& e : s.evals) log["evals"].push_back({{"iteration", e.iteration}, {"valid", parts_json(e.parts)}});
      log["steps"] = json::array();
      for (const auto& p : s.steps) log["steps"].push_back(parts_json(p));
      log["best_valid"] = s.evals.empty() ? json(nullptr) : json(s.best_valid);
      log["best_iteration"] = s.best_iteration;
      log["stopped_early"] = s.stopped_early;
      log["coverage_before"] = s.coverage_before ? json(*s.coverage_before) : json(nullptr);
      log["coverage_after"] = s.coverage_after ? json(*s.coverage_after) : json(nullptr);
      *out_log = dup(log.dump());
    }
    *out = model.release();
  });
}

usum_status usum_model_load(const char* path, usum_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new usum_model{load_checkpoint_file(path)};
  });
}

usum_status usum_model_save(const usum_model* model, const char* path) {
  return guarded([&] {
    need(model, "model");
    need(path, "path");
    save_checkpoint_file(model->ckpt, path);
  });
}

usum_status usum_model_info(const usum_model* model, char** out_json) {
  return guarded([&] {
    need(model, "model");
    need(out_json, "out_json");
    const ModelDims& d = model->ckpt.model.dims();
    json j{{"config", model->ckpt.config.to_json()},
           {"fingerprint", model->ckpt.config.fingerprint()},
           {"iteration", model->ckpt.iteration},
           {"dims",
            {{"vocab_size", d.vocab_size},
             {"embed_dim", d.embed_dim},
             {"ext_hidden", d.ext_hidden},
             {"abs_hidden", d.abs_hidden}}},
           {"parameters", model->ckpt.model.params().num_values()},
           {"info", model->ckpt.info}};
    *out_json = dup(j.dump(2));
  });
}

void usum_model_free(usum_model* model) { delete model; }

usum_status usum_decode(const usum_model* model, const usum_corpus* corpus, const char* options_json,
                        char** out_text) {
  return guarded([&] {
    need(model, "model");
    need(corpus, "corpus");
    need(out_text, "out_text");
    DecodeMode mode = DecodeMode::kUnified;
    const Checkpoint ckpt = with_options(model->ckpt, parse_optional(options_json), mode);
    std::string text;
    for (const auto& pair : corpus->pairs) text += detokenize(summarize(ckpt, pair.article, mode).tokens) + "\n";
    *out_text = dup(text);
  });
}

usum_status usum_evaluate(const usum_model* model, const usum_corpus* corpus, const char* options_json,
                          char** out_report) {
  return guarded([&] {
    need(model, "model");
    need(corpus, "corpus");
    need(out_report, "out_report");
    DecodeMode mode = DecodeMode::kUnified;
    const Checkpoint ckpt = with_options(model->ckpt, parse_optional(options_json), mode);
    *out_report = dup(evaluate(ckpt, corpus->pairs, mode).dump(2));
  });
}

usum_status usum_rouge(const char* candidate, const char* reference, const char* metric, char** out_json) {
  return guarded([&] {
    need(candidate, "candidate");
    need(reference, "reference");
    need(metric, "metric");
    need(out_json, "out_json");
    const Tokens c = tokenize(candidate), r = tokenize(reference);
    const std::string m = metric;
    RougeScore s;
    if (m == "1" || m == "2")
      s = rouge_n(c, r, m == "1" ? 1 : 2);
    else if (m == "L" || m == "l")
      s = rouge_l(c, r);
    else
      throw ConfigError("unknown ROUGE metric '" + m + "' (expected 1, 2 or L)");
    *out_json = dup(json{{"metric", m}, {"recall", s.recall}, {"precision", s.precision}, {"f1", s.f1}}.dump());
  });
}

usum_status usum_gradcheck(uint64_t seed, double epsilon, double tolerance, char** out_json, int* passed) {
  return guarded([&] {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    bool all = true;
    json checks = json::array();
    for (const auto& c : check_all_losses(seed, epsilon, tolerance)) {
      all = all && c.report.pass;
      checks.push_back({{"loss", c.loss},
                        {"max_rel_error", c.report.max_rel_error},
                        {"worst_param", c.report.worst_param},
                        {"worst_index", c.report.worst_index},
                        {"entries", c.report.entries_checked},
                        {"pass", c.report.pass}});
    }
    if (out_json)
      *out_json = dup(json{{"seed", seed}, {"epsilon", epsilon}, {"tolerance", tolerance}, {"checks", checks}, {"pass", all}}
                          .dump(2));
    if (passed) *passed = all ? 1 : 0;
  });
}

}  // extern "C"
