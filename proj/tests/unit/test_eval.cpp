#include <functional>
#include <map>

#include "ctxrr/corpus/synthetic.hpp"
#include "ctxrr/eval/pipeline.hpp"
#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace ctxrr;
using namespace ctxrr::oracle;

namespace {

CandidateSet toy_candidates() {
  return CandidateSet({tokenize("hello"), tokenize("where should it be"), tokenize("api_call french paris cheap"),
                       tokenize("api_call italian rome cheap")});
}

}  // namespace

TEST_CASE("accuracy") {
  const auto cands = toy_candidates();
  std::vector<std::size_t> golds{0, 2, 3, 1};
  auto all = accuracy(golds, golds, cands);
  CHECK(all.total == 1.0);
  REQUIRE(all.api);
  CHECK(*all.api == 1.0);
  CHECK(all.api_instances == 2);

  auto half = accuracy(std::vector<std::size_t>{0, 2, 2, 0}, golds, cands);
  CHECK(half.total == 0.5);
  CHECK(*half.api == 0.5);

  auto no_api = accuracy(std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0, 0}, cands);
  CHECK(no_api.total == 0.5);
  CHECK(!no_api.api);
  CHECK(no_api.api_instances == 0);

  CHECK_THROWS_AS(accuracy(std::vector<std::size_t>{0}, golds, cands), DataError);
}

TEST_CASE("top-K accuracy") {
  std::vector<Vector> r{{0.1, 0.5, 0.4}, {0.3, 0.3, 0.0}, {0.9, 0.05, 0.05}};
  std::vector<std::size_t> g{2, 1, 2};
  CHECK(topk_accuracy(r, g, 1) == 0.0);
  // a tie places the higher id later: gold 1 in row 2 is second
  CHECK(topk_accuracy(r, g, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(topk_accuracy(r, g, 3) == 1.0);
  CHECK_THROWS_AS(topk_accuracy(r, g, 0), DataError);

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vector> rows;
    std::vector<std::size_t> golds;
    std::vector<std::size_t> pred;
    for (int i = 0; i < 30; ++i) {
      Vector v(8);
      for (double& x : v) x = rng.below(4) * 0.25;  // plenty of ties
      rows.push_back(v);
      golds.push_back(rng.below(8));
      pred.push_back(argmax(v));
    }
    double prev = 0.0;
    for (std::size_t k = 1; k <= 8; ++k) {
      const double a = topk_accuracy(rows, golds, k);
      CHECK(a >= prev);
      prev = a;
    }
    CHECK(prev == 1.0);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) correct += pred[i] == golds[i];
    CHECK(topk_accuracy(rows, golds, 1) == static_cast<double>(correct) / golds.size());
  }
}

TEST_CASE("wer basics") {
  CHECK(wer(tokenize("i want french food"), tokenize("i want french food")) == 0.0);
  CHECK(wer(tokenize("i want french food"), {}) == 1.0);
  CHECK(wer(tokenize("book a table for two"), tokenize("book table for two")) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_AS(wer({}, tokenize("x")), DataError);
  CHECK_THROWS_AS(wer(tokenize("a the"), tokenize("x"), true), DataError);
  CHECK(stop_words().size() == 25);
}

TEST_CASE("wer fixture matches hand scores and the Levenshtein oracle") {
  struct Pair {
    const char* ref;
    const char* hyp;
    double expected;
  };
  const Pair fixture[] = {
      {"book a table for two", "book table for two", 1.0 / 5},
      {"i want french food", "i want french food", 0.0},
      {"in paris", "in a paris", 1.0 / 2},
      {"cheap price range", "cheap rice range", 1.0 / 3},
      {"hello", "", 1.0},
      {"a b c d", "d c b a", 4.0 / 4},
      {"uh i want italian", "i want italian", 1.0 / 4},
      {"where should it be", "where would it be please", 2.0 / 4},
      {"two people", "to people", 1.0 / 2},
      {"api call", "api call call call", 2.0 / 2},
  };
  for (const auto& p : fixture) {
    CAPTURE(p.ref);
    const auto ref = tokenize(p.ref), hyp = tokenize(p.hyp);
    CHECK(edit_distance(ref, hyp) == oracle_levenshtein(ref, hyp));
    CHECK(wer(ref, hyp) == static_cast<double>(oracle_levenshtein(ref, hyp)) / ref.size());
    CHECK(wer(ref, hyp) == doctest::Approx(p.expected).epsilon(1e-15));
  }
}

TEST_CASE("filtered wer removes only stop words") {
  const auto kept = remove_stop_words(tokenize("i want a table for two in the cheap part of town"));
  CHECK(kept == tokenize("want table two cheap part town"));
  // words that merely contain stop words survive
  CHECK(remove_stop_words(tokenize("italian atop within")) == tokenize("italian atop within"));
  CHECK(wer(tokenize("book a table for two"), tokenize("book table for two"), true) == 0.0);
  CHECK(wer(tokenize("the cheap one"), tokenize("a cheap won"), true) == 0.5);
}

TEST_CASE("wer distance is symmetric") {
  Rng rng(2);
  const Tokens words{"a", "the", "food", "cheap", "paris", "in", "please", "two"};
  for (int trial = 0; trial < 200; ++trial) {
    Tokens a, b;
    for (std::size_t i = 0, n = 1 + rng.below(8); i < n; ++i) a.push_back(words[rng.below(words.size())]);
    for (std::size_t i = 0, n = 1 + rng.below(8); i < n; ++i) b.push_back(words[rng.below(words.size())]);
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    const auto af = remove_stop_words(a), bf = remove_stop_words(b);
    if (af.empty() || bf.empty()) continue;
    CHECK(wer(a, b, true) * af.size() == doctest::Approx(wer(b, a, true) * bf.size()).epsilon(1e-12));
  }
}

TEST_CASE("reports round trip through json lines") {
  EvalReport a;
  a.model = "mmn RR2";
  a.total_acc = 0.1 + 0.2;
  a.api_acc = 1.0 / 3.0;
  a.topk = {{1, 0.5}, {2, 0.75}, {3, 0.875}};
  a.instances = 500;
  a.api_instances = 100;
  a.config = {{"seed", "7"}, {"matcher", "mmn"}};
  EvalReport b;
  b.model = "BDS";
  b.total_acc = 1.0;
  b.instances = 3;
  CHECK(report_from_json(report_to_json(a)) == a);
  const auto back = reports_from_jsonl(reports_to_jsonl({a, b}));
  REQUIRE(back.size() == 2);
  CHECK(back[0] == a);
  CHECK(back[1] == b);
  CHECK(!back[1].api_acc);
  CHECK_THROWS_AS(report_from_json("{\"model\": 3}"), DataError);

  const auto table = format_table({b, a});
  CHECK(table.find("mmn RR2") != std::string::npos);
  CHECK(table.find("30.0") != std::string::npos);
  CHECK(table.find("87.5") != std::string::npos);
}

TEST_CASE("evaluate and ablation on a small trained pipeline") {
  GeneratorConfig g;
  g.n_dialogs = 30;
  g.schema = restaurant_schema(3);
  g.seed = 51;
  auto corpus = generate_synthetic_corpus(g);
  auto train = expand_all(corpus.dialogs, corpus.candidates);
  g.n_dialogs = 8;
  g.seed = 52;
  auto test_corpus = generate_synthetic_corpus(g);
  auto test = expand_all(test_corpus.dialogs, corpus.candidates);

  BdsConfig bcfg;
  bcfg.dim = 16;
  bcfg.epochs = 3;
  auto bds = train_bds(train, corpus.candidates, bcfg, 1).model;
  MatchConfig mcfg;
  mcfg.dim = 12;
  mcfg.hops = 1;
  mcfg.epochs = 2;
  MatcherFactory factory = [&](const std::vector<RankingInstance>& t, std::uint64_t seed) {
    return train_matcher(MatcherKind::kMmn, t, corpus.candidates, mcfg, seed);
  };
  MetaConfig meta;
  meta.hidden = 16;
  meta.epochs = 3;
  auto st = train_stacking(train, corpus.candidates, bds, factory, split_folds(train, 5, 1), {}, meta, 4);
  const auto scores = score_all(test, bds, *st.matcher);

  EvalOptions opts;
  opts.matcher_name = "mmn";
  opts.topk = 3;
  opts.config = {{"seed", "4"}};
  const auto reports = evaluate(test, corpus.candidates, scores, &st.meta, opts);
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].model == "BDS");
  CHECK(reports[1].model == "mmn MAT");
  CHECK(reports[2].model == "mmn RR1");
  CHECK(reports[3].model == "mmn RR2");
  for (std::size_t r : {0, 1}) {
    CHECK(reports[r].topk.at(1) == reports[r].total_acc);
    CHECK(reports[r].topk.at(1) <= reports[r].topk.at(2));
    CHECK(reports[r].topk.at(2) <= reports[r].topk.at(3));
  }
  for (const auto& r : reports) {
    CHECK(r.instances == test.size());
    CHECK(r.config.at("seed") == "4");
  }
  CHECK(evaluate(test, corpus.candidates, scores, nullptr, opts).size() == 3);

  AblationSetup setup;
  setup.train = &train;
  setup.oof = &st.oof;
  setup.candidates = &corpus.candidates;
  setup.test = &test;
  setup.test_scores = &scores;
  setup.meta = meta;
  setup.seed = 4;
  setup.opts = opts;
  const auto ablation = run_ablation(setup);
  REQUIRE(ablation.size() == 4);
  for (std::size_t v = 0; v < 4; ++v) CHECK(ablation[v].model == kAblationRows[v]);
  CHECK(ablation[3].config.at("use_ctx") == "0");
  CHECK(ablation[3].config.at("use_ans") == "0");
  // all switches on is the standard stacking run
  CHECK(ablation[0].total_acc == reports[3].total_acc);
  CHECK(ablation[0].api_acc == reports[3].api_acc);
}
