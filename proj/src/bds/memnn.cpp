#include "ctxrr/bds/memnn.hpp"

#include <numeric>

#include "ctxrr/numeric/adam.hpp"
#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

MemNN::MemNN(Vocabulary vocab, std::size_t n_candidates, const BdsConfig& cfg, Rng& rng)
    : vocab_(std::move(vocab)),
      dim_(cfg.dim),
      hops_(cfg.hops),
      temporal_(cfg.temporal),
      max_memory_(cfg.max_memory) {
  if (dim_ == 0 || hops_ == 0 || n_candidates == 0) throw DataError("BDS dimensions must be positive");
  for (std::size_t k = 0; k <= hops_; ++k) {
    tensors_.emplace_back(vocab_.size(), dim_);
    init_uniform(tensors_.back(), rng, cfg.init_scale);
  }
  tensors_.emplace_back(n_candidates, dim_);
  init_uniform(tensors_.back(), rng, cfg.init_scale);
}

memnet::EncodedInput MemNN::encode(const RankingInstance& inst) const {
  return memnet::encode_input(inst, vocab_, max_memory_, temporal_);
}

BdsOutput MemNN::forward(const memnet::EncodedInput& in, memnet::Trace* trace) const {
  std::span<const Matrix> stack(tensors_.data(), hops_ + 1);
  BdsOutput out;
  out.context_state = memnet::forward(stack, in, memnet::Attention::kDot, trace);
  Vector logits(n_candidates(), 0.0);
  matvec_add(W(), out.context_state, logits);
  out.y_bds = softmax(logits);
  return out;
}

double MemNN::loss(const memnet::EncodedInput& in, std::size_t gold, std::vector<Matrix>* grads) const {
  memnet::Trace trace;
  const auto out = forward(in, grads ? &trace : nullptr);
  const double l = cross_entropy(out.y_bds, gold);
  if (grads) {
    // d(-log(y_g + floor)) / d logits, exact including the floor term.
    const double scale = out.y_bds[gold] / (out.y_bds[gold] + kProbFloor);
    Vector dlogits(out.y_bds.size());
    for (std::size_t i = 0; i < dlogits.size(); ++i) dlogits[i] = scale * out.y_bds[i];
    dlogits[gold] -= scale;
    outer_add(grads->back(), 1.0, dlogits, out.context_state);
    Vector du(dim_, 0.0);
    matvec_t_add(W(), dlogits, du);
    std::span<const Matrix> stack(tensors_.data(), hops_ + 1);
    std::span<Matrix> dstack(grads->data(), hops_ + 1);
    memnet::backward(stack, dstack, in, memnet::Attention::kDot, trace, du);
  }
  return l;
}

ModelContainer MemNN::to_container() const {
  ModelContainer c;
  c.kind = std::string(kBdsKind);
  c.set_meta("vocab", vocab_.serialize());
  c.set_meta("dim", std::to_string(dim_));
  c.set_meta("hops", std::to_string(hops_));
  c.set_meta("temporal", temporal_ ? "1" : "0");
  c.set_meta("max_memory", std::to_string(max_memory_));
  for (std::size_t k = 0; k <= hops_; ++k) c.add_tensor("A" + std::to_string(k + 1), tensors_[k]);
  c.add_tensor("W", W());
  return c;
}

MemNN MemNN::from_container(const ModelContainer& c) {
  if (c.kind != kBdsKind) throw DataError("not a BDS model: " + c.kind);
  MemNN m;
  m.vocab_ = Vocabulary::deserialize(c.meta_value("vocab"));
  m.dim_ = std::stoul(c.meta_value("dim"));
  m.hops_ = std::stoul(c.meta_value("hops"));
  m.temporal_ = c.meta_value("temporal") == "1";
  m.max_memory_ = std::stoul(c.meta_value("max_memory"));
  for (std::size_t k = 0; k <= m.hops_; ++k) m.tensors_.push_back(c.tensor("A" + std::to_string(k + 1)));
  m.tensors_.push_back(c.tensor("W"));
  for (std::size_t k = 0; k <= m.hops_; ++k)
    if (m.tensors_[k].rows() != m.vocab_.size() || m.tensors_[k].cols() != m.dim_)
      throw DataError("BDS model: embedding shape does not match vocabulary");
  return m;
}

Vocabulary bds_vocabulary(const std::vector<RankingInstance>& instances,
                          const CandidateSet& candidates, const BdsConfig& cfg) {
  return build_vocabulary(instances, candidates,
                          cfg.temporal ? memnet::temporal_tokens(cfg.max_memory) : Tokens{});
}

BdsOutput bds_forward(const RankingInstance& inst, const MemNN& model) {
  return model.forward(model.encode(inst));
}

Vector bds_predict(const RankingInstance& inst, const MemNN& model) {
  return bds_forward(inst, model).y_bds;
}

BdsTrainResult train_bds(const std::vector<RankingInstance>& train, const CandidateSet& candidates,
                         const BdsConfig& cfg, std::uint64_t seed) {
  if (train.empty()) throw DataError("train_bds: no training instances");
  Rng rng(seed);
  MemNN model(bds_vocabulary(train, candidates, cfg), candidates.size(), cfg, rng);
  std::vector<memnet::EncodedInput> encoded;
  encoded.reserve(train.size());
  for (const auto& inst : train) encoded.push_back(model.encode(inst));

  Adam adam(model.tensors(), {.lr = cfg.lr});
  auto grads = zeros_like(model.tensors());
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  BdsTrainResult res{model, {}};
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      zero_all(grads);
      for (std::size_t i = start; i < end; ++i)
        total += model.loss(encoded[order[i]], train[order[i]].gold, &grads);
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grads)
        for (double& x : g.data()) x *= inv;
      clip_global_norm(grads, cfg.clip_norm);
      adam.step(model.tensors(), grads);
    }
    res.loss_trace.push_back(total / static_cast<double>(train.size()));
  }
  res.model = std::move(model);
  return res;
}

}  // namespace ctxrr
