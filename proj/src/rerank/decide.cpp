#include "ctxrr/rerank/decide.hpp"

#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

RerankDecision rerank_rule(std::span<const double> y_bds, const MatchOutput& match, const RuleConfig& cfg,
                           bool vote) {
  return majority_vote(argmax(y_bds), argmax(match.y_mat), rule_rerank(y_bds, match.y_mat, cfg), vote);
}

RerankDecision rerank_stacking(std::span<const double> y_bds, const MatchOutput& match, std::size_t turn_count,
                               const MetaModel& meta, const ActionSpace& space, const CandidateSet& candidates,
                               bool vote) {
  const auto x = build_meta_features(y_bds, match, turn_count, meta.features());
  return majority_vote(argmax(y_bds), argmax(match.y_mat), meta_predict(meta, x, space, candidates, match.y_mat),
                       vote);
}

}  // namespace ctxrr
