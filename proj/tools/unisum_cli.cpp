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

// unisum command line front end. Talks to the library only through the C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "unisum/unisum.h"

namespace {

using nlohmann::json;

// Carries a status code out of nested helpers.
struct Failure {
  usum_status code;
  std::string message;
};

void check(usum_status st) {
  if (st != USUM_OK) throw Failure{st, usum_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  usum_string_free(s);
  return out;
}

struct CorpusDeleter {
  void operator()(usum_corpus* c) const { usum_corpus_free(c); }
};
struct ModelDeleter {
  void operator()(usum_model* m) const { usum_model_free(m); }
};
using CorpusPtr = std::unique_ptr<usum_corpus, CorpusDeleter>;
using ModelPtr = std::unique_ptr<usum_model, ModelDeleter>;

CorpusPtr load_corpus(const std::string& path) {
  usum_corpus* c = nullptr;
  check(usum_corpus_load(path.c_str(), &c));
  return CorpusPtr(c);
}

ModelPtr load_model(const std::string& path) {
  usum_model* m = nullptr;
  check(usum_model_load(path.c_str(), &m));
  return ModelPtr(m);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Failure{USUM_ERR_DATA, "cannot read " + path};
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw Failure{USUM_ERR_DATA, "cannot write " + path};
}

// Output to --out when given, stdout otherwise.
void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
}

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::string preset;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed (overrides the config)");
  cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output file");
  cmd->add_option("--preset", c.preset, "Configuration preset")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--set", c.sets, "Override one config field, KEY=VALUE (VALUE is JSON or a bare string)");
}

// preset < config file < --set < --seed. Returns the resolved config.
json resolve_config(const Common& c, const json& extra = json::object()) {
  json overrides = json::object();
  if (!c.config.empty()) {
    try {
      overrides = json::parse(read_file(c.config));
    } catch (const json::exception& e) {
      throw Failure{USUM_ERR_CONFIG, c.config + ": " + e.what()};
    }
    if (!overrides.is_object()) throw Failure{USUM_ERR_CONFIG, c.config + ": expected a JSON object"};
  }
  std::string preset = c.preset;
  if (preset.empty()) preset = overrides.value("preset", std::string("desk"));
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw Failure{USUM_ERR_CONFIG, "--set expects KEY=VALUE, got '" + kv + "'"};
    const std::string value = kv.substr(eq + 1);
    json parsed = json::parse(value, nullptr, false);
    overrides[kv.substr(0, eq)] = parsed.is_discarded() ? json(value) : parsed;
  }
  if (c.seed) overrides["seed"] = *c.seed;
  overrides.update(extra);
  char* out_json = nullptr;
  char* out_fp = nullptr;
  check(usum_config_resolve(preset.c_str(), overrides.dump().c_str(), &out_json, &out_fp));
  std::cerr << "config fingerprint: " << take(out_fp) << "\n";
  return json::parse(take(out_json));
}

void print_fingerprint(const json& doc) {
  char* fp = nullptr;
  check(usum_fingerprint(doc.dump().c_str(), &fp));
  std::cerr << "config fingerprint: " << take(fp) << "\n";
}

void on_progress(const char* event_json, void*) {
  const json e = json::parse(event_json);
  std::cerr << "iter " << e["iteration"] << "  valid " << e["valid"]["total"] << "\n";
}

struct TrainArgs {
  std::string corpus, valid, labels, init, abs_init, log;
};

int run_train(const char* regime, const Common& c, const TrainArgs& a) {
  if (c.out.empty()) throw Failure{USUM_ERR_CONFIG, "--out is required for training"};
  const json config = resolve_config(c, {{"regime", regime}});
  CorpusPtr train = load_corpus(a.corpus);
  if (!a.labels.empty()) check(usum_corpus_set_labels(train.get(), read_file(a.labels).c_str()));
  CorpusPtr valid;
  if (!a.valid.empty()) valid = load_corpus(a.valid);
  ModelPtr init, abs_init;
  if (!a.init.empty()) init = load_model(a.init);
  if (!a.abs_init.empty()) abs_init = load_model(a.abs_init);

  usum_set_progress(on_progress, nullptr);
  usum_model* out = nullptr;
  char* log = nullptr;
  check(usum_train(config.dump().c_str(), train.get(), valid.get(), init.get(), abs_init.get(), &out, &log));
  ModelPtr model(out);
  json log_json = json::parse(take(log));
  check(usum_model_save(model.get(), c.out.c_str()));
  if (!a.log.empty()) write_file(a.log, log_json.dump(2) + "\n");
  log_json.erase("steps");
  log_json.erase("evals");
  std::cout << log_json.dump(2) << "\n";
  return 0;
}

struct DecodeArgs {
  std::string model, corpus, mode = "unified";
  std::optional<int> max_len, beam;
};

json decode_options(const DecodeArgs& a, const usum_model* model) {
  json options{{"mode", a.mode}};
  if (a.max_len) options["max_len"] = *a.max_len;
  if (a.beam) options["beam_width"] = *a.beam;
  char* info = nullptr;
  check(usum_model_info(model, &info));
  json config = json::parse(take(info))["config"];
  for (const auto& [k, v] : options.items())
    if (k != "mode") config[k] = v;
  print_fingerprint({{"config", config}, {"mode", a.mode}});
  return options;
}

void add_train_options(CLI::App* cmd, TrainArgs& a, bool needs_init) {
  cmd->add_option("--corpus", a.corpus, "Training corpus (JSON lines)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--valid", a.valid, "Validation corpus (default: tail of --corpus)")->check(CLI::ExistingFile);
  cmd->add_option("--labels", a.labels, "Precomputed labels from make-labels")->check(CLI::ExistingFile);
  auto* init = cmd->add_option("--init", a.init, "Checkpoint supplying vocabulary and parameters")
                   ->check(CLI::ExistingFile);
  if (needs_init) init->required();
  cmd->add_option("--abs-init", a.abs_init, "Checkpoint whose abstracter replaces the one from --init")
      ->check(CLI::ExistingFile);
  cmd->add_option("--log", a.log, "Write the full training log (JSON) here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unisum: unified extractive and abstractive summarizer"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", std::string(usum_version()));
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Silence warnings");

  Common common;
  TrainArgs train_args;
  DecodeArgs decode_args;
  std::string corpus, candidate, reference, metric, dims = "toy";
  std::size_t records = 1000;
  double epsilon = 1e-5, tolerance = 1e-3;

  auto* labels_cmd = app.add_subcommand("make-labels", "Greedy oracle sentence labels");
  labels_cmd->add_option("--corpus", corpus, "Corpus (JSON lines)")->required()->check(CLI::ExistingFile);
  add_common(labels_cmd, common);

  auto* synth_cmd = app.add_subcommand("gen-synth", "Generate the synthetic paraphrase corpus");
  auto* records_opt =
      synth_cmd->add_option("--records", records, "Number of records")->check(CLI::PositiveNumber);
  add_common(synth_cmd, common);

  struct TrainCmd {
    const char* name;
    const char* regime;
    const char* help;
    bool needs_init;
  };
  const TrainCmd train_cmds[] = {
      {"pretrain-ext", "pretrain-ext", "Pretrain the extractor", false},
      {"pretrain-abs", "pretrain-abs", "Pretrain the abstracter on oracle sentences", false},
      {"train-two-stage", "two-stage", "Train the abstracter on extractor-selected sentences", true},
      {"train-e2e", "e2e", "End-to-end training through the fused attention", true},
  };
  std::vector<std::pair<CLI::App*, const char*>> trainers;
  for (const auto& t : train_cmds) {
    auto* cmd = app.add_subcommand(t.name, t.help);
    add_train_options(cmd, train_args, t.needs_init);
    add_common(cmd, common);
    trainers.emplace_back(cmd, t.regime);
  }

  auto* decode_cmd = app.add_subcommand("decode", "Print one summary per record");
  auto* eval_cmd = app.add_subcommand("evaluate", "Metrics report (JSON)");
  for (auto* cmd : {decode_cmd, eval_cmd}) {
    cmd->add_option("--model", decode_args.model, "Checkpoint")->required()->check(CLI::ExistingFile);
    cmd->add_option("--corpus", decode_args.corpus, "Corpus (JSON lines)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--mode", decode_args.mode, "unified, two-stage or abstracter")
        ->check(CLI::IsMember({"unified", "two-stage", "abstracter"}));
    cmd->add_option("--max-len", decode_args.max_len, "Summary length cap in tokens")->check(CLI::PositiveNumber);
    cmd->add_option("--beam", decode_args.beam, "Beam width")->check(CLI::PositiveNumber);
    add_common(cmd, common);
  }

  auto* rouge_cmd = app.add_subcommand("score-rouge", "ROUGE of a candidate against a reference");
  rouge_cmd->add_option("--candidate", candidate, "Candidate text file")->required()->check(CLI::ExistingFile);
  rouge_cmd->add_option("--reference", reference, "Reference text file")->required()->check(CLI::ExistingFile);
  rouge_cmd->add_option("--metric", metric, "1, 2 or L")->required()->check(CLI::IsMember({"1", "2", "L"}));
  add_common(rouge_cmd, common);

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check of every loss");
  grad_cmd->add_option("--dims", dims, "Problem size")->check(CLI::IsMember({"toy"}));
  grad_cmd->add_option("--epsilon", epsilon, "Central difference step")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--tolerance", tolerance, "Max relative error")->check(CLI::PositiveNumber);
  add_common(grad_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : USUM_ERR_CONFIG;
  }
  usum_set_warnings(quiet ? 0 : 1);

  try {
    if (labels_cmd->parsed()) {
      print_fingerprint({{"command", "make-labels"}});
      CorpusPtr c = load_corpus(corpus);
      char* text = nullptr;
      check(usum_make_labels(c.get(), &text));
      emit(common.out, take(text));
      return 0;
    }
    if (synth_cmd->parsed()) {
      const std::uint64_t seed = common.seed.value_or(1);
      json settings = json::object();
      if (!common.config.empty()) settings = json::parse(read_file(common.config));
      if (records_opt->count() > 0 || !settings.contains("num_records")) settings["num_records"] = records;
      print_fingerprint({{"command", "gen-synth"}, {"settings", settings}, {"seed", seed}});
      usum_corpus* c = nullptr;
      check(usum_corpus_generate(settings.dump().c_str(), seed, &c));
      CorpusPtr owned(c);
      if (common.out.empty()) throw Failure{USUM_ERR_CONFIG, "--out is required for gen-synth"};
      check(usum_corpus_save(c, common.out.c_str()));
      return 0;
    }
    for (const auto& [cmd, regime] : trainers)
      if (cmd->parsed()) return run_train(regime, common, train_args);
    if (decode_cmd->parsed() || eval_cmd->parsed()) {
      ModelPtr model = load_model(decode_args.model);
      CorpusPtr c = load_corpus(decode_args.corpus);
      const std::string options = decode_options(decode_args, model.get()).dump();
      char* text = nullptr;
      if (decode_cmd->parsed()) {
        check(usum_decode(model.get(), c.get(), options.c_str(), &text));
        emit(common.out, take(text));
      } else {
        check(usum_evaluate(model.get(), c.get(), options.c_str(), &text));
        emit(common.out, take(text) + "\n");
      }
      return 0;
    }
    if (rouge_cmd->parsed()) {
      print_fingerprint({{"command", "score-rouge"}, {"metric", metric}});
      char* text = nullptr;
      check(usum_rouge(read_file(candidate).c_str(), read_file(reference).c_str(), metric.c_str(), &text));
      emit(common.out, take(text) + "\n");
      return 0;
    }
    if (grad_cmd->parsed()) {
      const std::uint64_t seed = common.seed.value_or(1);
      print_fingerprint({{"command", "gradcheck"}, {"dims", dims}, {"seed", seed}, {"epsilon", epsilon},
                         {"tolerance", tolerance}});
      char* text = nullptr;
      int passed = 0;
      check(usum_gradcheck(seed, epsilon, tolerance, &text, &passed));
      const json report = json::parse(take(text));
      for (const auto& c : report["checks"])
        std::cerr << c["loss"].get<std::string>() << "  max rel error " << c["max_rel_error"].get<double>()
                  << (c["pass"].get<bool>() ? "  ok" : "  FAIL") << "\n";
      emit(common.out, report.dump(2) + "\n");
      return passed ? 0 : USUM_ERR_NUMERIC;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return USUM_ERR_INTERNAL;
  }
  return USUM_ERR_INTERNAL;
}
