#include "ctxrr/rerank/meta.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ctxrr/numeric/adam.hpp"
#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

Vector build_meta_features(std::span<const double> y_bds, const MatchOutput& match, std::size_t turn_count,
                           const FeatureConfig& cfg) {
  const std::size_t n = y_bds.size();
  if (match.y_mat.size() != n) throw DataError("meta features: y_bds and y_mat differ in length");
  if (!match.e_ctx || !match.e_ans)
    throw DataError("stacking needs a matcher with context/answer embeddings (mmn or qalstm)");
  if (cfg.max_turns == 0) throw DataError("meta features: max_turns must be positive");
  const std::size_t d = match.e_ctx->size();
  Vector x(meta_input_dim(n, d, cfg), 0.0);
  for (std::size_t i : top_k_indices(y_bds, cfg.mask_width)) x[i] = y_bds[i];
  for (std::size_t i : top_k_indices(match.y_mat, cfg.mask_width)) x[n + i] = match.y_mat[i];
  for (std::size_t k = 0; k < d; ++k) {
    double v = 0.0;
    if (cfg.use_ctx) v += (*match.e_ctx)[k];
    if (cfg.use_ans) v += (*match.e_ans)[k];
    x[2 * n + k] = v;
  }
  const std::size_t turn = std::max<std::size_t>(1, std::min(turn_count, cfg.max_turns));
  x[2 * n + d + turn - 1] = 1.0;
  return x;
}

MetaTarget meta_target(std::size_t gold, const ActionSpace& space) {
  MetaTarget t;
  t.action = space.class_of(gold);
  const auto& a = space.action(gold);
  t.api = a.is_api_call();
  if (t.api) {
    for (std::size_t s = 0; s < a.slots.size(); ++s) {
      const auto v = space.schema().value_index(s, a.slots[s]);
      if (!v) throw DataError("meta target: slot value '" + a.slots[s] + "' not in schema");
      t.slots.push_back(*v);
    }
  }
  return t;
}

MetaModel::MetaModel(std::size_t input_dim, std::size_t n_actions, const SlotSchema& schema,
                     const FeatureConfig& features, const MetaConfig& cfg, Rng& rng)
    : schema_(schema), features_(features) {
  if (input_dim == 0 || n_actions == 0 || cfg.hidden == 0) throw DataError("meta model: dimensions must be positive");
  auto add = [&](std::size_t r, std::size_t c) {
    params_.emplace_back(r, c);
    init_uniform(params_.back(), rng, cfg.init_scale);
  };
  add(input_dim, cfg.hidden);
  add(cfg.hidden, 1);
  add(n_actions, cfg.hidden);
  add(n_actions, 1);
  for (const auto& values : schema_.values) {
    add(values.size(), cfg.hidden);
    add(values.size(), 1);
  }
}

namespace {

Vector head_forward(const Matrix& W, const Matrix& b, const Vector& h) {
  Vector logits(b.data());
  matvec_add(W, h, logits);
  return softmax(logits);
}

/// Cross-entropy backward for one head; returns the loss and adds dh.
double head_backward(const Matrix& W, const Vector& p, std::size_t target, const Vector& h, Matrix& dW,
                     Matrix& db, Vector& dh) {
  const double l = cross_entropy(p, target);
  const double scale = p[target] / (p[target] + kProbFloor);
  Vector dlogits(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) dlogits[i] = scale * p[i];
  dlogits[target] -= scale;
  outer_add(dW, 1.0, dlogits, h);
  axpy(1.0, dlogits, db.data());
  matvec_t_add(W, dlogits, dh);
  return l;
}

}  // namespace

MetaModel::Output MetaModel::forward(std::span<const double> x) const {
  if (x.size() != input_dim()) throw DataError("meta model: feature length does not match input dimension");
  Output out;
  out.hidden = params_[1].data();
  const Matrix& W1 = params_[0];
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) axpy(x[i], W1.row(i), out.hidden);
  for (double& v : out.hidden) v = std::tanh(v);
  out.action = head_forward(params_[2], params_[3], out.hidden);
  for (std::size_t s = 0; s < schema_.arity(); ++s)
    out.slots.push_back(head_forward(params_[4 + 2 * s], params_[5 + 2 * s], out.hidden));
  return out;
}

double MetaModel::loss(std::span<const double> x, const MetaTarget& t, std::vector<Matrix>* grads) const {
  const Output out = forward(x);
  if (!grads) {
    double l = cross_entropy(out.action, t.action);
    if (t.api)
      for (std::size_t s = 0; s < out.slots.size(); ++s) l += cross_entropy(out.slots[s], t.slots.at(s));
    return l;
  }
  auto& g = *grads;
  Vector dh(out.hidden.size(), 0.0);
  double l = head_backward(params_[2], out.action, t.action, out.hidden, g[2], g[3], dh);
  if (t.api)
    for (std::size_t s = 0; s < out.slots.size(); ++s)
      l += head_backward(params_[4 + 2 * s], out.slots[s], t.slots.at(s), out.hidden, g[4 + 2 * s], g[5 + 2 * s], dh);
  for (std::size_t k = 0; k < dh.size(); ++k) dh[k] *= 1.0 - out.hidden[k] * out.hidden[k];
  axpy(1.0, dh, g[1].data());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) axpy(x[i], dh, g[0].row(i));
  return l;
}

ModelContainer MetaModel::to_container() const {
  ModelContainer c;
  c.kind = std::string(kMetaKind);
  c.set_meta("mask_width", std::to_string(features_.mask_width));
  c.set_meta("max_turns", std::to_string(features_.max_turns));
  c.set_meta("use_ctx", features_.use_ctx ? "1" : "0");
  c.set_meta("use_ans", features_.use_ans ? "1" : "0");
  // slot name<TAB>space-separated values
  std::ostringstream os;
  for (std::size_t s = 0; s < schema_.arity(); ++s) {
    os << schema_.names[s] << '\t';
    for (std::size_t v = 0; v < schema_.values[s].size(); ++v) os << (v ? " " : "") << schema_.values[s][v];
    os << '\n';
  }
  c.set_meta("schema", os.str());
  c.add_tensor("W1", params_[0]);
  c.add_tensor("b1", params_[1]);
  c.add_tensor("Wa", params_[2]);
  c.add_tensor("ba", params_[3]);
  for (std::size_t s = 0; s < schema_.arity(); ++s) {
    c.add_tensor("Ws" + std::to_string(s), params_[4 + 2 * s]);
    c.add_tensor("bs" + std::to_string(s), params_[5 + 2 * s]);
  }
  return c;
}

MetaModel MetaModel::from_container(const ModelContainer& c) {
  if (c.kind != kMetaKind) throw DataError("not a meta model: " + c.kind);
  MetaModel m;
  m.features_.mask_width = std::stoul(c.meta_value("mask_width"));
  m.features_.max_turns = std::stoul(c.meta_value("max_turns"));
  m.features_.use_ctx = c.meta_value("use_ctx") == "1";
  m.features_.use_ans = c.meta_value("use_ans") == "1";
  std::istringstream is(c.meta_value("schema"));
  std::string line;
  while (std::getline(is, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("meta model: malformed schema entry");
    m.schema_.names.push_back(line.substr(0, tab));
    m.schema_.values.push_back(tokenize(line.substr(tab + 1)));
  }
  for (const char* name : {"W1", "b1", "Wa", "ba"}) m.params_.push_back(c.tensor(name));
  for (std::size_t s = 0; s < m.schema_.arity(); ++s) {
    m.params_.push_back(c.tensor("Ws" + std::to_string(s)));
    m.params_.push_back(c.tensor("bs" + std::to_string(s)));
    if (m.params_[4 + 2 * s].rows() != m.schema_.values[s].size())
      throw DataError("meta model: slot head does not match schema");
  }
  return m;
}

std::vector<double> train_meta(MetaModel& model, const std::vector<Vector>& features,
                               const std::vector<MetaTarget>& targets, const MetaConfig& cfg, Rng& rng) {
  if (features.empty() || features.size() != targets.size())
    throw DataError("meta training: features and targets must be non-empty and aligned");
  Adam adam(model.params(), {.lr = cfg.lr});
  auto grads = zeros_like(model.params());
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> trace;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch);
      zero_all(grads);
      for (std::size_t i = start; i < end; ++i) total += model.loss(features[order[i]], targets[order[i]], &grads);
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grads)
        for (double& x : g.data()) x *= inv;
      clip_global_norm(grads, cfg.clip_norm);
      adam.step(model.params(), grads);
    }
    trace.push_back(total / static_cast<double>(features.size()));
  }
  return trace;
}

RerankDecision meta_predict(const MetaModel& model, std::span<const double> features, const ActionSpace& space,
                            const CandidateSet& candidates, std::span<const double> y_mat) {
  if (model.n_actions() != space.size()) throw DataError("meta model: action space size mismatch");
  const auto out = model.forward(features);
  RerankDecision d;
  d.provenance = Provenance::kStacking;
  d.heads.push_back(out.action);
  for (const auto& s : out.slots) d.heads.push_back(s);
  // per-candidate view: plain classes keep their probability, an api_call is
  // the api probability scaled by each slot's share of that slot's best value
  d.scores.assign(candidates.size(), 0.0);
  for (std::size_t id = 0; id < candidates.size(); ++id) {
    const auto& a = space.action(id);
    if (!a.is_api_call()) {
      d.scores[id] = out.action[space.class_of(id)];
      continue;
    }
    double p = out.action[space.api_class()];
    for (std::size_t s = 0; s < out.slots.size(); ++s) {
      const auto v = model.schema().value_index(s, a.slots[s]);
      const double best = out.slots[s][argmax(out.slots[s])];
      p *= v ? out.slots[s][*v] / best : 0.0;
    }
    d.scores[id] = p;
  }
  const std::size_t cls = argmax(out.action);
  if (cls != space.api_class()) {
    d.chosen = space.candidate_of(cls);
    return d;
  }
  Tokens call{std::string(kApiCallToken)};
  for (std::size_t s = 0; s < out.slots.size(); ++s) call.push_back(model.schema().values[s][argmax(out.slots[s])]);
  if (const auto id = candidates.find(call)) {
    d.chosen = *id;
    return d;
  }
  const auto& apis = space.api_candidates();
  if (apis.empty()) throw DataError("meta model chose api_call but no api_call candidate exists");
  d.chosen = apis.front();
  for (std::size_t id : apis)
    if (y_mat[id] > y_mat[d.chosen]) d.chosen = id;
  return d;
}

}  // namespace ctxrr
