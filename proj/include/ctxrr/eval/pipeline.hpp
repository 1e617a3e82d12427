#pragma once

#include "ctxrr/bds/memnn.hpp"
#include "ctxrr/eval/report.hpp"
#include "ctxrr/rerank/decide.hpp"
#include "ctxrr/rerank/stacking.hpp"

namespace ctxrr {

/// Frozen base-model outputs for a test set, computed once per evaluation.
struct ScoredSet {
  std::vector<Vector> y_bds;
  std::vector<MatchOutput> match;
};

ScoredSet score_all(const std::vector<RankingInstance>& instances, const MemNN& bds, const Matcher& matcher);

struct EvalOptions {
  std::string matcher_name;
  RuleConfig rule;
  bool vote = true;
  std::size_t topk = 0;  // 0: no top-K columns; otherwise acc@1..K for BDS and MAT
  std::map<std::string, std::string> config;  // copied into every report
};

/// Rows BDS, MAT, RR1 and, when `meta` is given, RR2.
std::vector<EvalReport> evaluate(const std::vector<RankingInstance>& test, const CandidateSet& candidates,
                                 const ScoredSet& scores, const MetaModel* meta, const EvalOptions& opts);

/// Predictions of the stacking re-ranker over a scored set.
std::vector<std::size_t> stacking_predictions(const std::vector<RankingInstance>& test,
                                              const CandidateSet& candidates, const ScoredSet& scores,
                                              const MetaModel& meta, bool vote);

struct AblationSetup {
  const std::vector<RankingInstance>* train = nullptr;
  const OofData* oof = nullptr;
  const CandidateSet* candidates = nullptr;
  const std::vector<RankingInstance>* test = nullptr;
  const ScoredSet* test_scores = nullptr;
  FeatureConfig features;
  MetaConfig meta;
  std::uint64_t seed = 1;
  EvalOptions opts;
};

inline constexpr const char* kAblationRows[] = {"Full", "w/o ctx", "w/o ans", "w/o ctx & ans"};

/// Refits the meta model with the context and/or answer block zeroed and
/// evaluates each variant. Reports come in kAblationRows order.
std::vector<EvalReport> run_ablation(const AblationSetup& setup);

}  // namespace ctxrr
