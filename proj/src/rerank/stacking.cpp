#include "ctxrr/rerank/stacking.hpp"

#include <algorithm>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

OofData collect_oof(const std::vector<RankingInstance>& train, const MemNN& bds, const MatcherFactory& factory,
                    const FoldAssignment& folds, std::uint64_t seed, FoldAudit* audit) {
  if (folds.fold_of.size() != train.size()) throw DataError("stacking: fold assignment does not cover the training set");
  OofData oof;
  oof.y_bds.resize(train.size());
  oof.match.resize(train.size());
  FoldAudit local;
  FoldAudit& a = audit ? *audit : local;
  a = {};
  a.meta_counts.assign(train.size(), 0);

  for (std::size_t f = 0; f < folds.folds; ++f) {
    FoldRecord rec;
    rec.fold = f;
    rec.trained_on = folds.complement(f);
    rec.scored = folds.members(f);
    std::vector<RankingInstance> subset;
    subset.reserve(rec.trained_on.size());
    for (std::size_t i : rec.trained_on) subset.push_back(train[i]);
    const auto matcher = factory(subset, seed + 1000003ULL * (f + 1));

    std::vector<bool> trained(train.size(), false);
    for (std::size_t i : rec.trained_on) trained[i] = true;
    for (std::size_t i : rec.scored) {
      if (trained[i]) {
        ++a.overlaps;
        continue;
      }
      oof.match[i] = matcher->score(train[i]);
      oof.y_bds[i] = bds_predict(train[i], bds);
      ++a.meta_counts[i];
    }
    a.records.push_back(std::move(rec));
  }
  if (a.overlaps != 0) throw DataError("stacking: fold leak, a matcher scored instances it was trained on");
  for (std::size_t i = 0; i < train.size(); ++i)
    if (a.meta_counts[i] != 1)
      throw DataError("stacking: training instance " + std::to_string(i) + " entered the meta set " +
                      std::to_string(a.meta_counts[i]) + " times");
  return oof;
}

namespace {

Matrix stack_rows(const std::vector<Vector>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw DataError("out-of-fold cache: ragged rows");
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

Vector row_vector(const Matrix& m, std::size_t r) { return Vector(m.row(r).begin(), m.row(r).end()); }

}  // namespace

ModelContainer oof_to_container(const OofData& oof) {
  ModelContainer c;
  c.kind = std::string(kOofKind);
  std::vector<Vector> y_mat, e_ctx, e_ans;
  for (const auto& m : oof.match) {
    y_mat.push_back(m.y_mat);
    if (!m.e_ctx || !m.e_ans) throw DataError("out-of-fold cache: match output without embeddings");
    e_ctx.push_back(*m.e_ctx);
    e_ans.push_back(*m.e_ans);
  }
  c.add_tensor("y_bds", stack_rows(oof.y_bds));
  c.add_tensor("y_mat", stack_rows(y_mat));
  c.add_tensor("e_ctx", stack_rows(e_ctx));
  c.add_tensor("e_ans", stack_rows(e_ans));
  return c;
}

OofData oof_from_container(const ModelContainer& c) {
  if (c.kind != kOofKind) throw DataError("not an out-of-fold cache: " + c.kind);
  const Matrix& yb = c.tensor("y_bds");
  const Matrix& ym = c.tensor("y_mat");
  const Matrix& ec = c.tensor("e_ctx");
  const Matrix& ea = c.tensor("e_ans");
  if (ym.rows() != yb.rows() || ec.rows() != yb.rows() || ea.rows() != yb.rows())
    throw DataError("out-of-fold cache: row counts differ");
  OofData oof;
  for (std::size_t r = 0; r < yb.rows(); ++r) {
    oof.y_bds.push_back(row_vector(yb, r));
    oof.match.push_back({row_vector(ym, r), row_vector(ec, r), row_vector(ea, r)});
  }
  return oof;
}

MetaModel fit_meta(const std::vector<RankingInstance>& train, const OofData& oof, const ActionSpace& space,
                   const FeatureConfig& features, const MetaConfig& cfg, std::uint64_t seed,
                   std::vector<double>* loss_trace) {
  if (oof.match.size() != train.size()) throw DataError("stacking: out-of-fold data does not match the training set");
  std::vector<Vector> xs;
  std::vector<MetaTarget> ts;
  xs.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    xs.push_back(build_meta_features(oof.y_bds[i], oof.match[i], train[i].turn_count, features));
    ts.push_back(meta_target(train[i].gold, space));
  }
  Rng rng(seed);
  MetaModel meta(xs.front().size(), space.size(), space.schema(), features, cfg, rng);
  auto trace = train_meta(meta, xs, ts, cfg, rng);
  if (loss_trace) *loss_trace = std::move(trace);
  return meta;
}

StackingResult train_stacking(const std::vector<RankingInstance>& train, const CandidateSet& candidates,
                              const MemNN& bds, const MatcherFactory& factory, const FoldAssignment& folds,
                              const FeatureConfig& features, const MetaConfig& cfg, std::uint64_t seed) {
  if (train.empty()) throw DataError("stacking: no training instances");
  const ActionSpace space(candidates, SlotSchema::from_candidates(candidates));
  FoldAudit audit;
  OofData oof = collect_oof(train, bds, factory, folds, seed, &audit);
  std::vector<double> trace;
  MetaModel meta = fit_meta(train, oof, space, features, cfg, seed, &trace);
  auto matcher = factory(train, seed);
  return {std::move(meta), std::move(matcher), std::move(oof), std::move(audit), std::move(trace)};
}

}  // namespace ctxrr
