#include "ctxrr/rerank/rule.hpp"

#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kVoteAgreement:
      return "VOTE_AGREEMENT";
    case Provenance::kRule:
      return "RULE";
    case Provenance::kStacking:
      return "STACKING";
    case Provenance::kBdsFallback:
      return "BDS_FALLBACK";
  }
  return "?";
}

RerankDecision rule_rerank(std::span<const double> y_bds, std::span<const double> y_mat, const RuleConfig& cfg) {
  if (y_bds.size() != y_mat.size()) throw DataError("rule_rerank: score vectors differ in length");
  if (y_bds.empty()) throw DataError("rule_rerank: no candidates");
  if (cfg.top_n == 0) throw DataError("rule_rerank: top_n must be at least 1");
  RerankDecision d;
  d.scores.assign(y_bds.size(), 0.0);
  for (std::size_t i : top_k_indices(y_mat, cfg.top_n)) d.scores[i] = sigmoid(y_bds[i]) * y_mat[i];

  bool any = false;
  std::size_t best = 0;
  for (std::size_t i = 0; i < d.scores.size(); ++i) {
    if (d.scores[i] <= 0.0) continue;
    if (!any || d.scores[i] > d.scores[best] || (d.scores[i] == d.scores[best] && y_bds[i] > y_bds[best]))
      best = i;
    any = true;
  }
  if (!any) {
    d.chosen = argmax(y_bds);
    d.provenance = Provenance::kBdsFallback;
  } else {
    d.chosen = best;
    d.provenance = Provenance::kRule;
  }
  return d;
}

RerankDecision majority_vote(std::size_t bds_top, std::size_t match_top, RerankDecision decision, bool enabled) {
  if (enabled && bds_top == match_top) {
    decision.chosen = bds_top;
    decision.provenance = Provenance::kVoteAgreement;
  }
  return decision;
}

}  // namespace ctxrr
