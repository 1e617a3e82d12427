#include "ctxrr/match/neural.hpp"
#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

namespace {

Vector bag_sum(const Matrix& table, std::span<const std::size_t> ids) {
  Vector out(table.cols(), 0.0);
  for (std::size_t id : ids) axpy(1.0, table.row(id), out);
  return out;
}

void bag_sum_backward(Matrix& d_table, std::span<const std::size_t> ids, std::span<const double> d) {
  for (std::size_t id : ids) axpy(1.0, d, d_table.row(id));
}

}  // namespace

Vocabulary slemb_vocabulary(const std::vector<RankingInstance>& train, const CandidateSet& candidates) {
  return build_vocabulary(train, candidates);
}

SlembMatcher::SlembMatcher(Vocabulary vocab, CandidateSet candidates, const MatchConfig& cfg, Rng& rng)
    : vocab_(std::move(vocab)), candidates_(std::move(candidates)) {
  if (cfg.dim == 0) throw DataError("SLEmb: dimension must be positive");
  for (int i = 0; i < 2; ++i) {
    params_.emplace_back(vocab_.size(), cfg.dim);
    init_uniform(params_.back(), rng, cfg.init_scale);
  }
  for (const auto& c : candidates_.all()) cand_ids_.push_back(vocab_.encode(c));
}

SlembMatcher::Input SlembMatcher::encode(const RankingInstance& inst) const {
  Input ids;
  for (const auto& h : inst.history) {
    const auto e = vocab_.encode(h);
    ids.insert(ids.end(), e.begin(), e.end());
  }
  const auto q = vocab_.encode(inst.query);
  ids.insert(ids.end(), q.begin(), q.end());
  return ids;
}

Vector SlembMatcher::context(const Input& in, CtxTrace*) const { return bag_sum(params_[0], in); }

void SlembMatcher::context_backward(const Input& in, const CtxTrace&, std::span<const double> d,
                                    std::vector<Matrix>& grads) const {
  bag_sum_backward(grads[0], in, d);
}

Vector SlembMatcher::candidate(std::size_t j, CandTrace*) const { return bag_sum(params_[1], cand_ids_.at(j)); }

void SlembMatcher::candidate_backward(std::size_t j, const CandTrace&, std::span<const double> d,
                                      std::vector<Matrix>& grads) const {
  bag_sum_backward(grads[1], cand_ids_.at(j), d);
}

void SlembMatcher::freeze() {
  cache_.clear();
  for (std::size_t j = 0; j < n_candidates(); ++j) cache_.push_back(candidate(j, nullptr));
}

MatchOutput SlembMatcher::score(const RankingInstance& inst) const {
  const Vector c = context(encode(inst), nullptr);
  MatchOutput out;
  out.y_mat.resize(cache_.size());
  for (std::size_t j = 0; j < cache_.size(); ++j) out.y_mat[j] = dot(c, cache_[j]);
  return out;
}

ModelContainer SlembMatcher::to_container() const {
  ModelContainer c;
  c.kind = std::string(matcher_tag(MatcherKind::kSlemb));
  c.set_meta("candidates", candidates_meta(candidates_));
  c.set_meta("vocab", vocab_.serialize());
  c.add_tensor("A", params_[0]);
  c.add_tensor("B", params_[1]);
  return c;
}

std::unique_ptr<SlembMatcher> SlembMatcher::from_container(const ModelContainer& c) {
  if (c.kind != matcher_tag(MatcherKind::kSlemb)) throw DataError("not a SLEmb model: " + c.kind);
  std::unique_ptr<SlembMatcher> m(new SlembMatcher());
  m->vocab_ = Vocabulary::deserialize(c.meta_value("vocab"));
  m->candidates_ = candidates_from_meta(c);
  m->params_ = {c.tensor("A"), c.tensor("B")};
  for (const auto& p : m->params_)
    if (p.rows() != m->vocab_.size() || p.cols() != m->params_[0].cols())
      throw DataError("SLEmb model: embedding shape does not match vocabulary");
  for (const auto& t : m->candidates_.all()) m->cand_ids_.push_back(m->vocab_.encode(t));
  m->freeze();
  return m;
}

}  // namespace ctxrr
