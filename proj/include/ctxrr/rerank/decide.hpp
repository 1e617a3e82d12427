#pragma once

#include "ctxrr/rerank/meta.hpp"

namespace ctxrr {

/// Rule re-ranking followed by the agreement vote.
RerankDecision rerank_rule(std::span<const double> y_bds, const MatchOutput& match, const RuleConfig& cfg,
                           bool vote = true);

/// Stacking re-ranking followed by the agreement vote.
RerankDecision rerank_stacking(std::span<const double> y_bds, const MatchOutput& match, std::size_t turn_count,
                               const MetaModel& meta, const ActionSpace& space, const CandidateSet& candidates,
                               bool vote = true);

}  // namespace ctxrr
