#include "ctxrr/match/neural.hpp"
#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

Vocabulary mmn_vocabulary(const std::vector<RankingInstance>& train, const CandidateSet& candidates,
                          const MatchConfig& cfg) {
  return build_vocabulary(train, candidates,
                          cfg.temporal ? memnet::temporal_tokens(cfg.max_memory) : Tokens{});
}

MmnMatcher::MmnMatcher(Vocabulary vocab, CandidateSet candidates, const MatchConfig& cfg, Rng& rng)
    : vocab_(std::move(vocab)),
      candidates_(std::move(candidates)),
      temporal_(cfg.temporal),
      max_memory_(cfg.max_memory) {
  if (cfg.dim == 0 || cfg.hops == 0) throw DataError("MMN: dimensions must be positive");
  for (std::size_t k = 0; k <= cfg.hops; ++k) {
    params_.emplace_back(vocab_.size(), cfg.dim);
    init_uniform(params_.back(), rng, cfg.init_scale);
  }
  for (const auto& c : candidates_.all()) cand_ids_.push_back(vocab_.encode(c));
}

MmnMatcher::Input MmnMatcher::encode(const RankingInstance& inst) const {
  return memnet::encode_input(inst, vocab_, max_memory_, temporal_);
}

Vector MmnMatcher::context(const Input& in, CtxTrace* trace) const {
  return memnet::forward(params_, in, memnet::Attention::kNormalized, trace);
}

void MmnMatcher::context_backward(const Input& in, const CtxTrace& t, std::span<const double> d,
                                  std::vector<Matrix>& grads) const {
  memnet::backward(params_, grads, in, memnet::Attention::kNormalized, t, d);
}

Vector MmnMatcher::candidate(std::size_t j, CandTrace*) const {
  return memnet::encode_sentence(params_.back(), cand_ids_.at(j));
}

void MmnMatcher::candidate_backward(std::size_t j, const CandTrace&, std::span<const double> d,
                                    std::vector<Matrix>& grads) const {
  memnet::encode_sentence_backward(grads.back(), cand_ids_.at(j), d);
}

void MmnMatcher::freeze() {
  cache_.clear();
  for (std::size_t j = 0; j < n_candidates(); ++j) cache_.push_back(candidate(j, nullptr));
}

MatchOutput MmnMatcher::score(const RankingInstance& inst) const {
  const Vector u = context(encode(inst), nullptr);
  MatchOutput out;
  out.y_mat.resize(cache_.size());
  for (std::size_t j = 0; j < cache_.size(); ++j) out.y_mat[j] = cosine(u, cache_[j]);
  out.e_ctx = u;
  out.e_ans = cache_.at(argmax(out.y_mat));
  return out;
}

ModelContainer MmnMatcher::to_container() const {
  ModelContainer c;
  c.kind = std::string(matcher_tag(MatcherKind::kMmn));
  c.set_meta("candidates", candidates_meta(candidates_));
  c.set_meta("vocab", vocab_.serialize());
  c.set_meta("temporal", temporal_ ? "1" : "0");
  c.set_meta("max_memory", std::to_string(max_memory_));
  for (std::size_t k = 0; k < params_.size(); ++k) c.add_tensor("A" + std::to_string(k + 1), params_[k]);
  return c;
}

std::unique_ptr<MmnMatcher> MmnMatcher::from_container(const ModelContainer& c) {
  if (c.kind != matcher_tag(MatcherKind::kMmn)) throw DataError("not a MMN model: " + c.kind);
  std::unique_ptr<MmnMatcher> m(new MmnMatcher());
  m->vocab_ = Vocabulary::deserialize(c.meta_value("vocab"));
  m->candidates_ = candidates_from_meta(c);
  m->temporal_ = c.meta_value("temporal") == "1";
  m->max_memory_ = std::stoul(c.meta_value("max_memory"));
  for (std::size_t k = 1; c.has_tensor("A" + std::to_string(k)); ++k)
    m->params_.push_back(c.tensor("A" + std::to_string(k)));
  if (m->params_.size() < 2) throw DataError("MMN model: needs at least one hop");
  for (const auto& p : m->params_)
    if (p.rows() != m->vocab_.size() || p.cols() != m->params_[0].cols())
      throw DataError("MMN model: embedding shape does not match vocabulary");
  for (const auto& t : m->candidates_.all()) m->cand_ids_.push_back(m->vocab_.encode(t));
  m->freeze();
  return m;
}

}  // namespace ctxrr
