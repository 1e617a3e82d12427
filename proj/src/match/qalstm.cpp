#include "ctxrr/match/neural.hpp"
#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

Vocabulary qalstm_vocabulary(const std::vector<RankingInstance>& train, const CandidateSet& candidates) {
  return build_vocabulary(train, candidates, {std::string(QaLstmMatcher::kSeparator)});
}

QaLstmMatcher::QaLstmMatcher(Vocabulary vocab, CandidateSet candidates, const MatchConfig& cfg, Rng& rng)
    : vocab_(std::move(vocab)),
      candidates_(std::move(candidates)),
      hidden_(cfg.hidden),
      max_len_(cfg.max_len) {
  if (cfg.dim == 0 || cfg.hidden == 0 || cfg.max_len == 0)
    throw DataError("QA-LSTM: dimensions must be positive");
  params_.emplace_back(vocab_.size(), cfg.dim);
  init_uniform(params_.back(), rng, cfg.init_scale);
  append_gru_params(params_, {cfg.dim, cfg.hidden}, rng, cfg.init_scale);
  append_gru_params(params_, {cfg.dim, cfg.hidden}, rng, cfg.init_scale);
  for (const auto& c : candidates_.all()) cand_ids_.push_back(vocab_.encode(c));
}

QaLstmMatcher::Input QaLstmMatcher::encode(const RankingInstance& inst) const {
  Input ids;
  const std::size_t sep = vocab_.id(std::string(kSeparator));
  for (const auto& h : inst.history) {
    const auto e = vocab_.encode(h);
    ids.insert(ids.end(), e.begin(), e.end());
    ids.push_back(sep);
  }
  const auto q = vocab_.encode(inst.query);
  ids.insert(ids.end(), q.begin(), q.end());
  if (ids.size() > max_len_) ids.erase(ids.begin(), ids.end() - static_cast<std::ptrdiff_t>(max_len_));
  return ids;
}

Vector QaLstmMatcher::encode_sequence(std::span<const std::size_t> ids, CtxTrace* trace) const {
  if (ids.empty()) return Vector(2 * hidden_, 0.0);
  const Matrix& E = params_[0];
  Matrix inputs(ids.size(), E.cols());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const auto row = E.row(ids[t]);
    std::copy(row.begin(), row.end(), inputs.row(t).begin());
  }
  std::span<const Matrix> rnn(params_.data() + 1, kBiGruTensors);
  const Matrix states = birnn_encode(rnn, inputs, trace ? &trace->rnn : nullptr);
  if (trace) trace->steps = ids.size();
  return max_pool(states, trace ? &trace->argmax : nullptr);
}

void QaLstmMatcher::sequence_backward(std::span<const std::size_t> ids, const CtxTrace& t,
                                      std::span<const double> d, std::vector<Matrix>& grads) const {
  if (ids.empty()) return;
  Matrix d_states(t.steps, 2 * hidden_);
  for (std::size_t k = 0; k < d.size(); ++k) d_states(t.argmax[k], k) += d[k];
  Matrix d_inputs(t.steps, params_[0].cols());
  std::span<const Matrix> rnn(params_.data() + 1, kBiGruTensors);
  std::span<Matrix> d_rnn(grads.data() + 1, kBiGruTensors);
  birnn_backward(rnn, d_rnn, t.rnn, d_states, d_inputs);
  for (std::size_t s = 0; s < ids.size(); ++s) axpy(1.0, d_inputs.row(s), grads[0].row(ids[s]));
}

Vector QaLstmMatcher::context(const Input& in, CtxTrace* trace) const { return encode_sequence(in, trace); }

void QaLstmMatcher::context_backward(const Input& in, const CtxTrace& t, std::span<const double> d,
                                     std::vector<Matrix>& grads) const {
  sequence_backward(in, t, d, grads);
}

Vector QaLstmMatcher::candidate(std::size_t j, CandTrace* trace) const {
  return encode_sequence(cand_ids_.at(j), trace);
}

void QaLstmMatcher::candidate_backward(std::size_t j, const CandTrace& t, std::span<const double> d,
                                       std::vector<Matrix>& grads) const {
  sequence_backward(cand_ids_.at(j), t, d, grads);
}

void QaLstmMatcher::freeze() {
  cache_.clear();
  for (std::size_t j = 0; j < n_candidates(); ++j) cache_.push_back(candidate(j, nullptr));
}

MatchOutput QaLstmMatcher::score(const RankingInstance& inst) const {
  const Vector c = context(encode(inst), nullptr);
  MatchOutput out;
  out.y_mat.resize(cache_.size());
  for (std::size_t j = 0; j < cache_.size(); ++j) out.y_mat[j] = cosine(c, cache_[j]);
  out.e_ctx = c;
  out.e_ans = cache_.at(argmax(out.y_mat));
  return out;
}

ModelContainer QaLstmMatcher::to_container() const {
  ModelContainer c;
  c.kind = std::string(matcher_tag(MatcherKind::kQalstm));
  c.set_meta("candidates", candidates_meta(candidates_));
  c.set_meta("vocab", vocab_.serialize());
  c.set_meta("hidden", std::to_string(hidden_));
  c.set_meta("max_len", std::to_string(max_len_));
  c.add_tensor("E", params_[0]);
  for (std::size_t i = 1; i < params_.size(); ++i) c.add_tensor("rnn" + std::to_string(i - 1), params_[i]);
  return c;
}

std::unique_ptr<QaLstmMatcher> QaLstmMatcher::from_container(const ModelContainer& c) {
  if (c.kind != matcher_tag(MatcherKind::kQalstm)) throw DataError("not a QA-LSTM model: " + c.kind);
  std::unique_ptr<QaLstmMatcher> m(new QaLstmMatcher());
  m->vocab_ = Vocabulary::deserialize(c.meta_value("vocab"));
  m->candidates_ = candidates_from_meta(c);
  m->hidden_ = std::stoul(c.meta_value("hidden"));
  m->max_len_ = std::stoul(c.meta_value("max_len"));
  m->params_.push_back(c.tensor("E"));
  for (std::size_t i = 0; i < kBiGruTensors; ++i) m->params_.push_back(c.tensor("rnn" + std::to_string(i)));
  if (m->params_[0].rows() != m->vocab_.size() || m->params_[1].rows() != m->hidden_)
    throw DataError("QA-LSTM model: tensor shapes do not match metadata");
  for (const auto& t : m->candidates_.all()) m->cand_ids_.push_back(m->vocab_.encode(t));
  m->freeze();
  return m;
}

}  // namespace ctxrr
