#include "ctxrr/match/training.hpp"

#include <numeric>

#include "ctxrr/match/neural.hpp"
#include "ctxrr/numeric/adam.hpp"
#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

NegativeDraw negative_sample(std::size_t gold, std::size_t n_candidates, Rng& rng,
                             const std::function<double(std::size_t)>& loss_of, std::size_t max_tries) {
  if (n_candidates < 2) throw DataError("negative sampling needs at least two candidates");
  if (max_tries == 0) throw DataError("negative sampling needs max_tries >= 1");
  NegativeDraw draw;
  while (draw.draws < max_tries) {
    draw.id = rng.below(n_candidates - 1);
    if (draw.id >= gold) ++draw.id;
    ++draw.draws;
    if (loss_of(draw.id) > 0.0) {
      draw.positive = true;
      break;
    }
  }
  return draw;
}

namespace {

template <bool Cosine>
double similarity(std::span<const double> c, std::span<const double> v) {
  if constexpr (Cosine) {
    return cosine(c, v);
  } else {
    return dot(c, v);
  }
}

/// Accumulates g * ds/dc into dc and g * ds/dv into dv.
template <bool Cosine>
void similarity_backward(std::span<const double> c, std::span<const double> v, double g,
                         std::span<double> dc, std::span<double> dv) {
  if constexpr (Cosine) {
    cosine_backward(c, v, g, dc, dv);
  } else {
    axpy(g, v, dc);
    axpy(g, c, dv);
  }
}

/// Backpropagates a positive triple loss given the context trace.
template <typename M>
void triple_backward(const M& model, const typename M::Input& in, const typename M::CtxTrace& ct,
                     const Vector& c, std::size_t pos, std::size_t neg, std::vector<Matrix>& grads) {
  typename M::CandTrace tp, tn;
  const Vector vp = model.candidate(pos, &tp);
  const Vector vn = model.candidate(neg, &tn);
  Vector dc(c.size(), 0.0), dvp(vp.size(), 0.0), dvn(vn.size(), 0.0);
  similarity_backward<M::kCosine>(c, vp, -1.0, dc, dvp);
  similarity_backward<M::kCosine>(c, vn, 1.0, dc, dvn);
  model.context_backward(in, ct, dc, grads);
  model.candidate_backward(pos, tp, dvp, grads);
  model.candidate_backward(neg, tn, dvn, grads);
}

}  // namespace

template <typename M>
double pair_loss(const M& model, const typename M::Input& in, std::size_t pos, std::size_t neg,
                 double margin, std::vector<Matrix>* grads) {
  typename M::CtxTrace ct;
  const Vector c = model.context(in, grads ? &ct : nullptr);
  const double l = margin_ranking_loss(margin, similarity<M::kCosine>(c, model.candidate(pos, nullptr)),
                                       similarity<M::kCosine>(c, model.candidate(neg, nullptr)));
  if (grads && l > 0.0) triple_backward(model, in, ct, c, pos, neg, *grads);
  return l;
}

template <typename M>
std::vector<double> train_margin(M& model, const std::vector<RankingInstance>& train,
                                 const MatchConfig& cfg, Rng& rng) {
  if (train.empty()) throw DataError("matcher training: no training instances");
  std::vector<typename M::Input> encoded;
  encoded.reserve(train.size());
  for (const auto& inst : train) encoded.push_back(model.encode(inst));

  const std::size_t n = model.n_candidates();
  Adam adam(model.params(), {.lr = cfg.lr});
  auto grads = zeros_like(model.params());
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Vector> cache(n);
  std::vector<bool> cached(n);
  auto cand = [&](std::size_t j) -> const Vector& {
    if (!cached[j]) {
      cache[j] = model.candidate(j, nullptr);
      cached[j] = true;
    }
    return cache[j];
  };

  std::vector<double> trace;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      // parameters are fixed within a batch, so candidate vectors are too
      std::fill(cached.begin(), cached.end(), false);
      zero_all(grads);
      for (std::size_t i = start; i < end; ++i) {
        const auto& in = encoded[order[i]];
        const std::size_t gold = train[order[i]].gold;
        typename M::CtxTrace ct;
        const Vector c = model.context(in, &ct);
        const double pos = similarity<M::kCosine>(c, cand(gold));
        auto loss_of = [&](std::size_t j) {
          return margin_ranking_loss(cfg.margin, pos, similarity<M::kCosine>(c, cand(j)));
        };
        const auto draw = negative_sample(gold, n, rng, loss_of, cfg.neg_tries);
        if (!draw.positive) continue;  // zero loss, zero gradient
        total += loss_of(draw.id);
        triple_backward(model, in, ct, c, gold, draw.id, grads);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grads)
        for (double& x : g.data()) x *= inv;
      clip_global_norm(grads, cfg.clip_norm);
      adam.step(model.params(), grads);
    }
    trace.push_back(total / static_cast<double>(train.size()));
  }
  model.freeze();
  return trace;
}

#define CTXRR_INSTANTIATE(M)                                                                      \
  template double pair_loss<M>(const M&, const M::Input&, std::size_t, std::size_t, double,      \
                               std::vector<Matrix>*);                                             \
  template std::vector<double> train_margin<M>(M&, const std::vector<RankingInstance>&,          \
                                               const MatchConfig&, Rng&);

CTXRR_INSTANTIATE(SlembMatcher)
CTXRR_INSTANTIATE(MmnMatcher)
CTXRR_INSTANTIATE(QaLstmMatcher)

#undef CTXRR_INSTANTIATE

}  // namespace ctxrr
