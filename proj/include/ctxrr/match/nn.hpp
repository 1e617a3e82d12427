#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ctxrr/match/matcher.hpp"

namespace ctxrr {

/// (last utterance -> responses) co-occurrence table.
struct PairEntry {
  Tokens key;  // sorted unique tokens of the utterance
  /// (candidate id, frequency), by decreasing frequency then first occurrence.
  std::vector<std::pair<std::size_t, std::size_t>> responses;
  std::size_t total = 0;
};

struct PairTable {
  std::vector<PairEntry> entries;  // in order of first occurrence
};

Tokens token_set(const Tokens& tokens);

PairTable fit_nn(const std::vector<RankingInstance>& train);

/// Picks the training utterance with the largest token-set overlap with the
/// query (ties: larger total frequency, then earlier occurrence) and scores
/// each candidate by its co-occurrence frequency with that utterance. No
/// overlapping utterance leaves every score at 0.
MatchOutput score_nn(const RankingInstance& inst, const CandidateSet& candidates, const PairTable& table);

class NnMatcher final : public Matcher {
 public:
  NnMatcher(PairTable table, CandidateSet candidates);
  MatcherKind kind() const override { return MatcherKind::kNn; }
  MatchOutput score(const RankingInstance& inst) const override;
  ModelContainer to_container() const override;
  static std::unique_ptr<NnMatcher> from_container(const ModelContainer& c);
  const PairTable& table() const { return table_; }

 private:
  PairTable table_;
  CandidateSet candidates_;
};

}  // namespace ctxrr
