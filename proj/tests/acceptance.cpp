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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N ...] [--expect-fail N ...] [--report FILE]
//
// Exit status is 0 when every failing criterion was listed with --expect-fail.
#include <bitset>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "abstracter.hpp"
#include "checkpoint.hpp"
#include "common.hpp"
#include "evaluate.hpp"
#include "extractor.hpp"
#include "fusion.hpp"
#include "gradcheck.hpp"
#include "oracle.hpp"
#include "oracles.hpp"
#include "rouge.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

using namespace unisum;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

// 1 ----------------------------------------------------------------------
Outcome fusion_correctness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  double worst = 0.0;
  int uniform_mismatch = 0;
  for (int i = 0; i < 1000; ++i) {
    const int sentences = 1 + static_cast<int>(rng() % 6);
    const int words = sentences + static_cast<int>(rng() % 30);
    std::vector<int> sent_of(static_cast<std::size_t>(words));
    for (int m = 0; m < words; ++m) sent_of[static_cast<std::size_t>(m)] = m < sentences ? m : static_cast<int>(rng() % sentences);
    std::sort(sent_of.begin(), sent_of.end());
    std::vector<double> alpha(static_cast<std::size_t>(words)), beta(static_cast<std::size_t>(sentences));
    double z = 0.0;
    for (double& a : alpha) z += (a = u(rng));
    for (double& a : alpha) a /= z;
    for (double& b : beta) b = u(rng);
    const auto fused = combine(alpha, beta, sent_of);
    worst = std::max(worst, std::abs(std::accumulate(fused.begin(), fused.end(), 0.0) - 1.0));
    const std::vector<double> flat(beta.size(), u(rng));
    if (combine(alpha, flat, sent_of) != alpha) ++uniform_mismatch;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && uniform_mismatch == 0 && secs < 1.0,
          "max |sum-1| " + fmt(worst) + ", uniform-beta mismatches " + std::to_string(uniform_mismatch) + ", " +
              fmt(secs, 3) + " s"};
}

// 2 ----------------------------------------------------------------------
Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::map<std::string, double> worst;
  for (std::uint64_t seed : {1, 2, 3})
    for (const auto& c : check_all_losses(seed, 1e-5, 1e-3)) {
      pass = pass && c.report.pass;
      worst[c.loss] = std::max(worst[c.loss], c.report.max_rel_error);
    }
  const double secs = seconds_since(t0);
  std::string detail = "max rel error";
  for (const auto& [name, err] : worst) detail += " " + name + "=" + fmt(err, 2);
  return {pass && secs < 120.0, detail + ", " + fmt(secs, 3) + " s"};
}

// 3 ----------------------------------------------------------------------
Outcome rouge_equivalence() {
  const auto t0 = Clock::now();
  // every sequence of length <= 6 over {a,b,c}
  std::vector<Tokens> seqs{{}};
  for (std::size_t start = 0; start < seqs.size(); ++start) {
    if (seqs[start].size() == 6) continue;
    for (const char* s : {"a", "b", "c"}) {
      Tokens next = seqs[start];
      next.push_back(s);
      seqs.push_back(next);
    }
  }
  // Subsequences as base-4 codes (digits 1..3), so LCS = longest shared code.
  auto code_of = [](const Tokens& t) {
    int c = 0;
    for (const auto& w : t) c = c * 4 + (w[0] - 'a' + 1);
    return c;
  };
  constexpr int kCodes = 4096;
  std::vector<int> code_len(kCodes, 0);
  for (int c = 1; c < kCodes; ++c) code_len[static_cast<std::size_t>(c)] = code_len[static_cast<std::size_t>(c / 4)] + 1;
  std::vector<std::bitset<kCodes>> subs(seqs.size());
  for (std::size_t i = 0; i < seqs.size(); ++i)
    for (const auto& s : oracle::subsequences(seqs[i])) subs[i].set(static_cast<std::size_t>(code_of(s)));

  std::size_t mismatches = 0, pairs = 0;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    for (std::size_t j = 0; j < seqs.size(); ++j) {
      ++pairs;
      const auto both = subs[i] & subs[j];
      std::size_t lcs = 0;
      for (std::size_t c = both._Find_first(); c < kCodes; c = both._Find_next(c))
        lcs = std::max<std::size_t>(lcs, static_cast<std::size_t>(code_len[c]));
      const auto want_l = oracle::score_of(lcs, seqs[j].size(), seqs[i].size());
      const auto got_l = rouge_l(seqs[i], seqs[j]);
      bool ok = got_l.recall == want_l.recall && got_l.precision == want_l.precision && got_l.f1 == want_l.f1;
      for (int n : {1, 2}) {
        const auto want = oracle::rouge_n(seqs[i], seqs[j], n);
        const auto got = rouge_n(seqs[i], seqs[j], n);
        ok = ok && got.recall == want.recall && got.precision == want.precision && got.f1 == want.f1;
      }
      mismatches += !ok;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 30.0, std::to_string(pairs) + " pairs, " + std::to_string(mismatches) +
                                              " mismatches, " + fmt(secs, 3) + " s"};
}

// 4 ----------------------------------------------------------------------
Outcome label_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  auto word = [&] { return std::string(1, static_cast<char>('a' + rng() % 8)); };
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    std::vector<Tokens> sentences(1 + rng() % 8);
    for (auto& s : sentences) {
      s.resize(1 + rng() % 6);
      for (auto& w : s) w = word();
    }
    Tokens reference(rng() % 14);
    for (auto& w : reference) w = word();
    if (extract_labels(from_sentences(sentences), reference) != oracle::greedy_labels(sentences, reference))
      ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 60.0,
          "500 articles, " + std::to_string(mismatches) + " mismatches, " + fmt(secs, 3) + " s"};
}

// 5 ----------------------------------------------------------------------
Outcome distribution_validity() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_sum = 0.0;
  int copy_leaks = 0, oov_leaks = 0;
  for (int step = 0; step < 1000; ++step) {
    ToyProblem p = make_toy_problem(1000 + static_cast<std::uint64_t>(step / 50));
    const Model& m = p.model;
    const int V = m.dims().vocab_size;
    Graph g(&m.params());
    EncoderOutput enc = encode(g, m, p.article);
    const int M = static_cast<int>(p.article.base_ids.size());
    Tensor h(Shape::vec(m.dims().abs_hidden));
    for (double& v : h.data) v = u(rng);
    std::vector<double> att(static_cast<std::size_t>(M));
    double z = 0.0;
    for (double& a : att) z += (a = std::exp(2.0 * u(rng)));
    for (double& a : att) a /= z;
    Var hv = g.constant(h);
    Var emb = g.lookup(m.abs().embedding, static_cast<int>(rng() % static_cast<std::uint64_t>(V)));
    Var av = g.constant(Tensor::vec(att));

    const auto free_run = decode_step(g, m, enc, p.article, hv, emb, av).final_dist.value().data;
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(free_run.begin(), free_run.end(), 0.0) - 1.0));

    const auto copy = decode_step(g, m, enc, p.article, hv, emb, av, 0.0).final_dist.value().data;
    std::set<int> in_article(p.article.extended_ids.begin(), p.article.extended_ids.end());
    double on_article = 0.0;
    for (std::size_t id = 0; id < copy.size(); ++id) {
      if (in_article.count(static_cast<int>(id)))
        on_article += copy[id];
      else if (copy[id] != 0.0)
        ++copy_leaks;
    }
    if (std::abs(on_article - 1.0) > 1e-12) ++copy_leaks;

    const auto gen = decode_step(g, m, enc, p.article, hv, emb, av, 1.0).final_dist.value().data;
    for (std::size_t id = static_cast<std::size_t>(V); id < gen.size(); ++id)
      if (gen[id] != 0.0) ++oov_leaks;
  }
  return {worst_sum <= 1e-6 && copy_leaks == 0 && oov_leaks == 0,
          "max |sum-1| " + fmt(worst_sum) + ", copy-only leaks " + std::to_string(copy_leaks) + ", OOV mass under p_gen=1 " +
              std::to_string(oov_leaks)};
}

// 6 ----------------------------------------------------------------------
Outcome coverage_identities() {
  std::mt19937_64 rng(606);
  int sum_errors = 0, range_errors = 0;
  double worst_model = 0.0;
  // dyadic attention rows add up exactly, so the identity is checked with ==
  for (int trial = 0; trial < 200; ++trial) {
    const int M = 2 + static_cast<int>(rng() % 8), T = 1 + static_cast<int>(rng() % 8);
    std::vector<std::vector<double>> att(static_cast<std::size_t>(T), std::vector<double>(static_cast<std::size_t>(M), 0.0));
    for (auto& row : att)
      for (int k = 0; k < 16; ++k) row[rng() % static_cast<std::size_t>(M)] += 1.0 / 16.0;
    std::vector<std::vector<double>> cov;
    const double loss = coverage_loss(att, &cov);
    for (int t = 0; t < T; ++t) {
      const auto& c = cov[static_cast<std::size_t>(t)];
      if (std::accumulate(c.begin(), c.end(), 0.0) != static_cast<double>(t)) ++sum_errors;
      double step = 0.0;
      for (int m = 0; m < M; ++m) step += std::min(att[static_cast<std::size_t>(t)][static_cast<std::size_t>(m)], c[static_cast<std::size_t>(m)]);
      if (step < 0.0 || step > 1.0) ++range_errors;
    }
    if (T == 1 && loss != 0.0) ++range_errors;
  }
  // attention produced by the model, through the graph
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ToyProblem p = make_toy_problem(seed);
    Graph g(&p.model.params());
    Var beta = score_sentences(g, p.model, p.article);
    TeacherForced tf = teacher_forced(g, p.model, p.article, p.targets, beta, true);
    std::vector<std::vector<double>> att, cov;
    for (const Var& a : tf.fused_attention) att.push_back(a.value().data);
    const double loss = coverage_loss(att, &cov);
    worst_model = std::max(worst_model, std::abs(loss - tf.coverage.item()));
    for (std::size_t t = 0; t < cov.size(); ++t)
      worst_model = std::max(worst_model, std::abs(std::accumulate(cov[t].begin(), cov[t].end(), 0.0) - static_cast<double>(t)));
    if (loss < 0.0 || loss > 1.0) ++range_errors;
    std::vector<std::vector<double>> first{att.front()};
    if (coverage_loss(first) != 0.0) ++range_errors;
  }
  return {sum_errors == 0 && range_errors == 0 && worst_model <= 1e-12,
          "exact-sum failures " + std::to_string(sum_errors) + ", range failures " + std::to_string(range_errors) +
              ", model attention max deviation " + fmt(worst_model, 2)};
}

// 7 and 8 share one desk-scale pipeline -------------------------------------
struct Pipeline {
  double seconds = 0.0;
  double ext_accuracy = 0.0;
  double unified_rouge_l = 0.0;
  double rate_without = 0.0;
  double rate_with = 0.0;
  double seconds_e2e = 0.0;
};

Checkpoint train_regime(const TrainConfig& base, Regime r, std::span<const SummaryPair> train,
                        std::span<const SummaryPair> valid, const Checkpoint* init, double lambda_inc = 1.0) {
  TrainConfig c = base;
  c.regime = r;
  c.lambda_inc = lambda_inc;
  Checkpoint ck = start_run(c, train, init);
  auto tr = prepare_examples(ck, train);
  auto va = prepare_examples(ck, valid);
  Trainer t(ck, tr, va);
  const auto t0 = Clock::now();
  t.run();
  std::cerr << "  " << regime_name(r) << (r == Regime::kEnd2End ? " lambda_inc=" + fmt(lambda_inc) : "") << " done in "
            << fmt(seconds_since(t0), 4) << " s, best valid " << ck.info["best_valid"] << " at "
            << ck.info["best_iteration"] << "\n";
  return ck;
}

const Pipeline& desk_pipeline() {
  static const Pipeline result = [] {
    Pipeline p;
    const auto t0 = Clock::now();
    const auto pairs = pairs_of(generate_synthetic(SynthConfig{}, 7));
    const std::span<const SummaryPair> all(pairs);
    const auto train = all.first(800), valid = all.subspan(800, 100), test = all.subspan(900);
    const TrainConfig desk = TrainConfig::desk();

    const Checkpoint ext = train_regime(desk, Regime::kPretrainExt, train, valid, nullptr);
    p.ext_accuracy = evaluate(ext, test, DecodeMode::kUnified)["extractive"]["label_accuracy"];
    const Checkpoint abs = train_regime(desk, Regime::kPretrainAbs, train, valid, &ext);
    const auto t1 = Clock::now();
    const Checkpoint without = train_regime(desk, Regime::kEnd2End, train, valid, &abs, 0.0);
    const Checkpoint with = train_regime(desk, Regime::kEnd2End, train, valid, &abs, 1.0);
    p.seconds_e2e = seconds_since(t1);
    p.rate_without = evaluate(without, test, DecodeMode::kUnified)["inconsistency"]["mean_rate"];
    const auto report = evaluate(with, test, DecodeMode::kUnified);
    p.rate_with = report["inconsistency"]["mean_rate"];
    p.unified_rouge_l = report["abstractive"]["rougeL_f1"];
    p.seconds = seconds_since(t0);
    return p;
  }();
  return result;
}

Outcome inconsistency_direction() {
  const Pipeline& p = desk_pipeline();
  return {p.rate_with * 2.0 <= p.rate_without && p.seconds < 1800.0,
          "R_inc without L_inc " + fmt(p.rate_without) + ", with " + fmt(p.rate_with) + " (ratio " +
              fmt(p.rate_with > 0 ? p.rate_without / p.rate_with : INFINITY, 3) + ", need >= 2), pipeline " +
              fmt(p.seconds, 4) + " s"};
}

Outcome desk_learning() {
  const Pipeline& p = desk_pipeline();
  return {p.ext_accuracy >= 0.9 && p.unified_rouge_l >= 0.9 && p.seconds < 1800.0,
          "extractor label accuracy " + fmt(p.ext_accuracy) + ", unified ROUGE-L F1 " + fmt(p.unified_rouge_l) +
              ", pipeline " + fmt(p.seconds, 4) + " s"};
}

// 9 ----------------------------------------------------------------------
std::string small_run_report() {
  const auto pairs = pairs_of(generate_synthetic(SynthConfig{}, 9));
  const std::span<const SummaryPair> all = std::span<const SummaryPair>(pairs).first(300);
  TrainConfig c = TrainConfig::desk();
  c.iters_ext = 40;
  c.iters_abs = 40;
  c.iters_coverage = 10;
  c.iters_e2e = 20;
  c.eval_interval = 10;
  c.eval_records = 20;
  const auto train = all.first(240), valid = all.subspan(240, 30), test = all.subspan(270);
  const Checkpoint ext = train_regime(c, Regime::kPretrainExt, train, valid, nullptr);
  const Checkpoint abs = train_regime(c, Regime::kPretrainAbs, train, valid, &ext);
  const Checkpoint e2e = train_regime(c, Regime::kEnd2End, train, valid, &abs);
  return evaluate(e2e, test, DecodeMode::kUnified).dump();
}

Outcome determinism() {
  const std::string a = small_run_report();
  const std::string b = small_run_report();

  const auto pairs = pairs_of(generate_synthetic(SynthConfig{}, 9));
  const std::span<const SummaryPair> train = std::span<const SummaryPair>(pairs).first(200);
  TrainConfig c = TrainConfig::desk();
  c.regime = Regime::kPretrainExt;
  Checkpoint ext = start_run(c, train);
  c.regime = Regime::kEnd2End;
  Checkpoint ck = start_run(c, train, &ext);
  auto ex = prepare_examples(ck, train);
  Trainer t(ck, ex, std::span<const Example>(ex).first(5));
  for (int i = 0; i < 5; ++i) t.step();
  const auto path = std::filesystem::temp_directory_path() / ("unisum_resume_" + std::to_string(::getpid()) + ".ckpt");
  save_checkpoint_file(ck, path.string());
  const double next = t.step().total;
  Checkpoint resumed = load_checkpoint_file(path.string());
  std::filesystem::remove(path);
  Trainer t2(resumed, ex, std::span<const Example>(ex).first(5));
  const double again = t2.step().total;
  const bool same_params = save_checkpoint(resumed) == save_checkpoint(ck);
  return {a == b && next == again && same_params,
          std::string("reports ") + (a == b ? "identical" : "differ") + ", next-step loss " + fmt(next, 17) + " vs " +
              fmt(again, 17) + (same_params ? ", states identical" : ", states differ")};
}

// 10 ---------------------------------------------------------------------
Outcome paper_preset_smoke() {
  const auto t0 = Clock::now();
  const auto path = std::filesystem::temp_directory_path() / ("unisum_paper_" + std::to_string(::getpid()) + ".jsonl");
  {
    SynthConfig sc;
    sc.num_records = 100;
    const auto pairs = pairs_of(generate_synthetic(sc, 10));
    std::ofstream out(path);
    write_corpus(out, pairs);
  }
  const auto corpus = read_corpus_file(path.string());
  std::filesystem::remove(path);
  const std::span<const SummaryPair> all(corpus);
  TrainConfig c = TrainConfig::paper();
  c.iters_ext = 2;
  c.iters_abs = 2;
  c.iters_coverage = 1;
  c.iters_two_stage = 2;
  c.iters_e2e = 2;
  c.eval_interval = 1;
  c.eval_records = 10;
  const auto train = all.first(80), valid = all.subspan(80, 10), test = all.subspan(90);
  const Checkpoint ext = train_regime(c, Regime::kPretrainExt, train, valid, nullptr);
  const Checkpoint abs = train_regime(c, Regime::kPretrainAbs, train, valid, &ext);
  const Checkpoint two = train_regime(c, Regime::kTwoStage, train, valid, &abs);
  const Checkpoint e2e = train_regime(c, Regime::kEnd2End, train, valid, &abs);
  const auto report = evaluate(e2e, test, DecodeMode::kUnified);
  const auto report2 = evaluate(two, test, DecodeMode::kTwoStage);
  const bool finite = std::isfinite(report["abstractive"]["rougeL_f1"].get<double>()) &&
                      std::isfinite(report2["abstractive"]["rougeL_f1"].get<double>());
  const bool paper_dims = e2e.model.dims().embed_dim == 128 && e2e.model.dims().abs_hidden == 256 &&
                          report["decode"]["beam_width"] == 4;
  return {finite && paper_dims, "paper preset ran on 100 records in " + fmt(seconds_since(t0), 3) +
                                    " s (no score target), ROUGE-L F1 " + fmt(report["abstractive"]["rougeL_f1"])};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, expect_fail;
  std::string report_path;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if ((a == "--only" || a == "--expect-fail") && i + 1 < argc)
      (a == "--only" ? only : expect_fail).insert(std::stoi(argv[++i]));
    else if (a == "--report" && i + 1 < argc)
      report_path = argv[++i];
    else {
      std::cerr << "usage: acceptance [--only N]... [--expect-fail N]... [--report FILE]\n";
      return 1;
    }
  }
  set_warnings_enabled(false);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"fusion correctness", fusion_correctness},
      {"gradient correctness", gradient_correctness},
      {"ROUGE oracle equivalence", rouge_equivalence},
      {"label oracle equivalence", label_equivalence},
      {"output distribution validity", distribution_validity},
      {"coverage identities", coverage_identities},
      {"inconsistency rate direction", inconsistency_direction},
      {"desk-scale learning", desk_learning},
      {"determinism and persistence", determinism},
      {"paper preset smoke run", paper_preset_smoke},
  };

  std::ostringstream lines;
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::string line = "criterion " + std::to_string(n) + " " + (o.pass ? "PASS" : "FAIL") + "  " + criteria[i].first +
                       ": " + o.detail;
    if (!o.pass && expect_fail.count(n)) line += "  [known failure]";
    if (!o.pass && !expect_fail.count(n)) ++unexpected;
    std::cout << line << std::endl;
    lines << line << "\n";
  }
  if (!report_path.empty()) std::ofstream(report_path) << lines.str();
  return unexpected == 0 ? 0 : 1;
}
