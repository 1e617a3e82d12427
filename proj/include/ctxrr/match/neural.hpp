#pragma once

#include <memory>

#include "ctxrr/bds/memory_network.hpp"
#include "ctxrr/corpus/vocabulary.hpp"
#include "ctxrr/match/matcher.hpp"
#include "ctxrr/numeric/gru.hpp"

namespace ctxrr {

/// Learned matchers share one shape: a context vector c from the input, an
/// answer vector v_j per candidate, and a similarity s(c, v_j) trained with a
/// margin ranking loss against sampled negatives. Each class below exposes
/// the encoder pieces that the generic trainer and the tests drive.

/// f(x, y) = (A x)^T (B y) over bag-of-words counts; x covers history and query.
class SlembMatcher final : public Matcher {
 public:
  using Input = std::vector<std::size_t>;
  struct CtxTrace {};
  struct CandTrace {};
  static constexpr bool kCosine = false;

  SlembMatcher(Vocabulary vocab, CandidateSet candidates, const MatchConfig& cfg, Rng& rng);

  MatcherKind kind() const override { return MatcherKind::kSlemb; }
  MatchOutput score(const RankingInstance& inst) const override;
  ModelContainer to_container() const override;
  static std::unique_ptr<SlembMatcher> from_container(const ModelContainer& c);

  Input encode(const RankingInstance& inst) const;
  Vector context(const Input& in, CtxTrace* trace) const;
  void context_backward(const Input& in, const CtxTrace& t, std::span<const double> d,
                        std::vector<Matrix>& grads) const;
  Vector candidate(std::size_t j, CandTrace* trace) const;
  void candidate_backward(std::size_t j, const CandTrace& t, std::span<const double> d,
                          std::vector<Matrix>& grads) const;

  std::size_t n_candidates() const { return candidates_.size(); }
  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }
  const Vocabulary& vocab() const { return vocab_; }
  /// Rebuilds the read-only candidate cache used by score().
  void freeze();

 private:
  SlembMatcher() = default;
  Vocabulary vocab_;
  CandidateSet candidates_;
  std::vector<std::vector<std::size_t>> cand_ids_;
  std::vector<Matrix> params_;  // A, B: V x d
  std::vector<Vector> cache_;
};

/// Memory network with L2-normalized attention. Context is u^{K+1}; each
/// candidate is position-encoded with the last table A^{K+1}; s is cosine.
class MmnMatcher final : public Matcher {
 public:
  using Input = memnet::EncodedInput;
  using CtxTrace = memnet::Trace;
  struct CandTrace {};
  static constexpr bool kCosine = true;

  MmnMatcher(Vocabulary vocab, CandidateSet candidates, const MatchConfig& cfg, Rng& rng);

  MatcherKind kind() const override { return MatcherKind::kMmn; }
  MatchOutput score(const RankingInstance& inst) const override;
  ModelContainer to_container() const override;
  static std::unique_ptr<MmnMatcher> from_container(const ModelContainer& c);
  std::size_t embedding_dim() const override { return params_.front().cols(); }

  Input encode(const RankingInstance& inst) const;
  Vector context(const Input& in, CtxTrace* trace) const;
  void context_backward(const Input& in, const CtxTrace& t, std::span<const double> d,
                        std::vector<Matrix>& grads) const;
  Vector candidate(std::size_t j, CandTrace* trace) const;
  void candidate_backward(std::size_t j, const CandTrace& t, std::span<const double> d,
                          std::vector<Matrix>& grads) const;

  std::size_t n_candidates() const { return candidates_.size(); }
  std::size_t hops() const { return params_.size() - 1; }
  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }
  const Vocabulary& vocab() const { return vocab_; }
  void freeze();

 private:
  MmnMatcher() = default;
  Vocabulary vocab_;
  CandidateSet candidates_;
  std::vector<std::vector<std::size_t>> cand_ids_;
  bool temporal_ = true;
  std::size_t max_memory_ = 50;
  std::vector<Matrix> params_;  // A^1..A^{K+1}: V x d
  std::vector<Vector> cache_;
};

/// Shared embedding and bidirectional GRU over context and answer, max-pooled
/// over time, compared by cosine. The context is the history lines, each
/// closed by a separator token, then the query; only the last `max_len`
/// tokens are kept.
class QaLstmMatcher final : public Matcher {
 public:
  static constexpr std::string_view kSeparator = "<sep>";
  using Input = std::vector<std::size_t>;
  struct CtxTrace {
    BiGruTrace rnn;
    std::vector<std::size_t> argmax;
    std::size_t steps = 0;
  };
  using CandTrace = CtxTrace;
  static constexpr bool kCosine = true;

  QaLstmMatcher(Vocabulary vocab, CandidateSet candidates, const MatchConfig& cfg, Rng& rng);

  MatcherKind kind() const override { return MatcherKind::kQalstm; }
  MatchOutput score(const RankingInstance& inst) const override;
  ModelContainer to_container() const override;
  static std::unique_ptr<QaLstmMatcher> from_container(const ModelContainer& c);
  std::size_t embedding_dim() const override { return 2 * hidden_; }

  Input encode(const RankingInstance& inst) const;
  Vector context(const Input& in, CtxTrace* trace) const;
  void context_backward(const Input& in, const CtxTrace& t, std::span<const double> d,
                        std::vector<Matrix>& grads) const;
  Vector candidate(std::size_t j, CandTrace* trace) const;
  void candidate_backward(std::size_t j, const CandTrace& t, std::span<const double> d,
                          std::vector<Matrix>& grads) const;

  /// Pooled encoding of an arbitrary id sequence.
  Vector encode_sequence(std::span<const std::size_t> ids, CtxTrace* trace) const;

  std::size_t n_candidates() const { return candidates_.size(); }
  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }
  const Vocabulary& vocab() const { return vocab_; }
  void freeze();

 private:
  QaLstmMatcher() = default;
  void sequence_backward(std::span<const std::size_t> ids, const CtxTrace& t,
                         std::span<const double> d, std::vector<Matrix>& grads) const;
  Vocabulary vocab_;
  CandidateSet candidates_;
  std::vector<std::vector<std::size_t>> cand_ids_;
  std::size_t hidden_ = 64;
  std::size_t max_len_ = 200;
  std::vector<Matrix> params_;  // E (V x d), then the bidirectional GRU tensors
  std::vector<Vector> cache_;
};

/// Margin loss of one (input, positive, negative) triple; accumulates
/// gradients into `grads` when given and the loss is positive.
template <typename M>
double pair_loss(const M& model, const typename M::Input& in, std::size_t pos, std::size_t neg,
                 double margin, std::vector<Matrix>* grads);

/// Epochs of mini-batch Adam with sampled negatives. Returns the mean
/// per-instance loss of each epoch and leaves the model frozen.
template <typename M>
std::vector<double> train_margin(M& model, const std::vector<RankingInstance>& train,
                                 const MatchConfig& cfg, Rng& rng);

Vocabulary slemb_vocabulary(const std::vector<RankingInstance>& train, const CandidateSet& candidates);
Vocabulary mmn_vocabulary(const std::vector<RankingInstance>& train, const CandidateSet& candidates,
                          const MatchConfig& cfg);
Vocabulary qalstm_vocabulary(const std::vector<RankingInstance>& train, const CandidateSet& candidates);

}  // namespace ctxrr
