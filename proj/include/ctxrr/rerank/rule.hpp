#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr {

enum class Provenance { kVoteAgreement, kRule, kStacking, kBdsFallback };

/// VOTE_AGREEMENT, RULE, STACKING, BDS_FALLBACK
std::string_view provenance_name(Provenance p);

struct RerankDecision {
  std::size_t chosen = 0;
  Vector scores;              // final per-candidate scores
  std::vector<Vector> heads;  // stacking: action head then one per slot
  Provenance provenance = Provenance::kRule;
};

struct RuleConfig {
  std::size_t top_n = 5;

  friend bool operator==(const RuleConfig&, const RuleConfig&) = default;
};

/// score_i = sigmoid(y_bds_i) * alpha_i * y_mat_i with alpha_i = 1 for the
/// top_n candidates by y_mat. Ties go to the higher y_bds, then the lower id.
/// When no score is positive the BDS argmax is returned as BDS_FALLBACK.
RerankDecision rule_rerank(std::span<const double> y_bds, std::span<const double> y_mat,
                           const RuleConfig& cfg = {});

/// When the BDS and matcher agree on their top candidate, that candidate wins.
RerankDecision majority_vote(std::size_t bds_top, std::size_t match_top, RerankDecision decision,
                             bool enabled = true);

}  // namespace ctxrr
