#pragma once

#include <map>
#include <string>

#include "ctxrr/match/matcher.hpp"

namespace ctxrr {

/// idf(t) = ln((1 + D) / (1 + df(t))) + 1 over D documents: one per training
/// instance (history + query) and one per candidate.
struct IdfTable {
  std::map<std::string, double> idf;
  std::size_t documents = 0;

  double operator()(const std::string& term) const;
};

IdfTable fit_tfidf(const std::vector<RankingInstance>& train, const CandidateSet& candidates);

using SparseVector = std::map<std::string, double>;
/// Raw term counts weighted by idf.
SparseVector tfidf_vector(const std::vector<const Tokens*>& document, const IdfTable& idf);

/// Cosine of the tf-idf vectors of the whole input (history plus query) and
/// of each candidate.
MatchOutput score_tfidf(const RankingInstance& inst, const CandidateSet& candidates, const IdfTable& idf);

class TfidfMatcher final : public Matcher {
 public:
  TfidfMatcher(IdfTable idf, CandidateSet candidates);
  MatcherKind kind() const override { return MatcherKind::kTfidf; }
  MatchOutput score(const RankingInstance& inst) const override;
  ModelContainer to_container() const override;
  static std::unique_ptr<TfidfMatcher> from_container(const ModelContainer& c);
  const IdfTable& idf() const { return idf_; }

 private:
  IdfTable idf_;
  CandidateSet candidates_;
  std::vector<SparseVector> cand_vecs_;
  std::vector<double> cand_norms_;
};

}  // namespace ctxrr
