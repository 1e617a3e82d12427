#pragma once

#include <functional>
#include <memory>

#include "ctxrr/bds/memnn.hpp"
#include "ctxrr/corpus/folds.hpp"
#include "ctxrr/rerank/meta.hpp"

namespace ctxrr {

inline constexpr std::string_view kOofKind = "STACK_OOF";

using MatcherFactory =
    std::function<std::unique_ptr<Matcher>(const std::vector<RankingInstance>& train, std::uint64_t seed)>;

/// One per-fold matcher: which instances trained it and which it scored.
struct FoldRecord {
  std::size_t fold = 0;
  std::vector<std::size_t> trained_on;
  std::vector<std::size_t> scored;
};

struct FoldAudit {
  std::vector<FoldRecord> records;
  std::size_t overlaps = 0;              // scored instances a fold's matcher also trained on
  std::vector<std::size_t> meta_counts;  // times each training instance entered the meta set
};

/// Out-of-fold base-model outputs for every training instance.
struct OofData {
  std::vector<Vector> y_bds;
  std::vector<MatchOutput> match;
};

/// Trains one matcher per fold on the other folds and scores the held-out
/// fold. Throws DataError on any fold leak or coverage gap.
OofData collect_oof(const std::vector<RankingInstance>& train, const MemNN& bds, const MatcherFactory& factory,
                    const FoldAssignment& folds, std::uint64_t seed, FoldAudit* audit = nullptr);

ModelContainer oof_to_container(const OofData& oof);
OofData oof_from_container(const ModelContainer& c);

/// Builds features from out-of-fold outputs and trains a fresh meta model.
MetaModel fit_meta(const std::vector<RankingInstance>& train, const OofData& oof, const ActionSpace& space,
                   const FeatureConfig& features, const MetaConfig& cfg, std::uint64_t seed,
                   std::vector<double>* loss_trace = nullptr);

struct StackingResult {
  MetaModel meta;
  std::unique_ptr<Matcher> matcher;  // trained on the full training set
  OofData oof;
  FoldAudit audit;
  std::vector<double> loss_trace;
};

StackingResult train_stacking(const std::vector<RankingInstance>& train, const CandidateSet& candidates,
                              const MemNN& bds, const MatcherFactory& factory, const FoldAssignment& folds,
                              const FeatureConfig& features, const MetaConfig& cfg, std::uint64_t seed);

}  // namespace ctxrr
