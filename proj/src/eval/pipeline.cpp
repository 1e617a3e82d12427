#include "ctxrr/eval/pipeline.hpp"

#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

ScoredSet score_all(const std::vector<RankingInstance>& instances, const MemNN& bds, const Matcher& matcher) {
  ScoredSet s;
  s.y_bds.reserve(instances.size());
  s.match.reserve(instances.size());
  for (const auto& inst : instances) {
    s.y_bds.push_back(bds_predict(inst, bds));
    s.match.push_back(matcher.score(inst));
  }
  return s;
}

namespace {

std::vector<std::size_t> golds_of(const std::vector<RankingInstance>& set) {
  std::vector<std::size_t> g;
  for (const auto& inst : set) g.push_back(inst.gold);
  return g;
}

EvalReport row(std::string name, const std::vector<std::size_t>& pred, const std::vector<std::size_t>& golds,
               const CandidateSet& candidates, const EvalOptions& opts) {
  auto r = make_report(std::move(name), accuracy(pred, golds, candidates));
  r.config = opts.config;
  return r;
}

}  // namespace

std::vector<std::size_t> stacking_predictions(const std::vector<RankingInstance>& test,
                                              const CandidateSet& candidates, const ScoredSet& scores,
                                              const MetaModel& meta, bool vote) {
  const ActionSpace space(candidates, meta.schema());
  std::vector<std::size_t> pred;
  for (std::size_t i = 0; i < test.size(); ++i)
    pred.push_back(
        rerank_stacking(scores.y_bds[i], scores.match[i], test[i].turn_count, meta, space, candidates, vote).chosen);
  return pred;
}

std::vector<EvalReport> evaluate(const std::vector<RankingInstance>& test, const CandidateSet& candidates,
                                 const ScoredSet& scores, const MetaModel* meta, const EvalOptions& opts) {
  if (scores.y_bds.size() != test.size() || scores.match.size() != test.size())
    throw DataError("evaluate: scores do not match the test set");
  const auto golds = golds_of(test);
  std::vector<std::size_t> bds, mat, rr1;
  for (std::size_t i = 0; i < test.size(); ++i) {
    bds.push_back(argmax(scores.y_bds[i]));
    mat.push_back(argmax(scores.match[i].y_mat));
    rr1.push_back(rerank_rule(scores.y_bds[i], scores.match[i], opts.rule, opts.vote).chosen);
  }
  const std::string prefix = opts.matcher_name.empty() ? "" : opts.matcher_name + " ";
  std::vector<EvalReport> out;
  out.push_back(row("BDS", bds, golds, candidates, opts));
  out.push_back(row(prefix + "MAT", mat, golds, candidates, opts));
  out.push_back(row(prefix + "RR1", rr1, golds, candidates, opts));
  if (meta) out.push_back(row(prefix + "RR2", stacking_predictions(test, candidates, scores, *meta, opts.vote), golds, candidates, opts));

  if (opts.topk > 0) {
    std::vector<Vector> y_mat;
    for (const auto& m : scores.match) y_mat.push_back(m.y_mat);
    for (std::size_t k = 1; k <= opts.topk; ++k) {
      out[0].topk[k] = topk_accuracy(scores.y_bds, golds, k);
      out[1].topk[k] = topk_accuracy(y_mat, golds, k);
    }
  }
  return out;
}

std::vector<EvalReport> run_ablation(const AblationSetup& s) {
  if (!s.train || !s.oof || !s.candidates || !s.test || !s.test_scores)
    throw DataError("ablation: incomplete setup");
  const ActionSpace space(*s.candidates, SlotSchema::from_candidates(*s.candidates));
  const auto golds = golds_of(*s.test);
  const std::pair<bool, bool> switches[] = {{true, true}, {false, true}, {true, false}, {false, false}};
  std::vector<EvalReport> out;
  for (std::size_t v = 0; v < 4; ++v) {
    FeatureConfig f = s.features;
    f.use_ctx = switches[v].first;
    f.use_ans = switches[v].second;
    const MetaModel meta = fit_meta(*s.train, *s.oof, space, f, s.meta, s.seed);
    const auto pred = stacking_predictions(*s.test, *s.candidates, *s.test_scores, meta, s.opts.vote);
    auto r = row(kAblationRows[v], pred, golds, *s.candidates, s.opts);
    r.config["use_ctx"] = f.use_ctx ? "1" : "0";
    r.config["use_ans"] = f.use_ans ? "1" : "0";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ctxrr
