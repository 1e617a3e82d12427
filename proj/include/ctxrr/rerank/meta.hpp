#pragma once

#include <cstdint>

#include "ctxrr/corpus/actions.hpp"
#include "ctxrr/match/matcher.hpp"
#include "ctxrr/numeric/container.hpp"
#include "ctxrr/numeric/random.hpp"
#include "ctxrr/rerank/rule.hpp"

namespace ctxrr {

inline constexpr std::string_view kMetaKind = "RERANK_META";

struct FeatureConfig {
  std::size_t mask_width = 10;  // H
  std::size_t max_turns = 30;   // L_max
  bool use_ctx = true;          // ablation switches zero a block, keeping its width
  bool use_ans = true;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

/// [y_bds * top-H mask, y_mat * top-H mask, e_ctx + e_ans, one-hot turn]. The
/// turn block has max_turns entries; turn t >= 1 sets entry min(t, max_turns) - 1.
/// Throws DataError when the match output carries no embeddings.
Vector build_meta_features(std::span<const double> y_bds, const MatchOutput& match, std::size_t turn_count,
                           const FeatureConfig& cfg = {});

inline std::size_t meta_input_dim(std::size_t n_candidates, std::size_t embed_dim, const FeatureConfig& cfg) {
  return 2 * n_candidates + embed_dim + cfg.max_turns;
}

struct MetaConfig {
  std::size_t hidden = 700;
  std::size_t epochs = 20;
  std::size_t batch = 64;
  double lr = 0.001;
  double init_scale = 0.1;
  double clip_norm = 40.0;

  friend bool operator==(const MetaConfig&, const MetaConfig&) = default;
};

/// Supervision for one instance: simplified action class and, for api_call
/// golds, the value index of every slot.
struct MetaTarget {
  std::size_t action = 0;
  bool api = false;
  std::vector<std::size_t> slots;
};

MetaTarget meta_target(std::size_t gold, const ActionSpace& space);

/// Shared tanh layer feeding an action head and one head per api_call slot.
/// W1 is stored input x hidden so sparse feature vectors touch only the rows
/// of their nonzero entries.
class MetaModel {
 public:
  MetaModel(std::size_t input_dim, std::size_t n_actions, const SlotSchema& schema, const FeatureConfig& features,
            const MetaConfig& cfg, Rng& rng);

  struct Output {
    Vector hidden;
    Vector action;
    std::vector<Vector> slots;
  };
  Output forward(std::span<const double> x) const;

  /// Summed cross-entropy; slot heads contribute only on api_call targets.
  double loss(std::span<const double> x, const MetaTarget& t, std::vector<Matrix>* grads) const;

  std::size_t input_dim() const { return params_[0].rows(); }
  std::size_t n_actions() const { return params_[2].rows(); }
  std::size_t head_count() const { return 1 + schema_.arity(); }
  const SlotSchema& schema() const { return schema_; }
  const FeatureConfig& features() const { return features_; }
  /// W1, b1, Wa, ba, then (Ws, bs) per slot.
  std::vector<Matrix>& params() { return params_; }
  const std::vector<Matrix>& params() const { return params_; }

  ModelContainer to_container() const;
  static MetaModel from_container(const ModelContainer& c);

 private:
  MetaModel() = default;
  SlotSchema schema_;
  FeatureConfig features_;
  std::vector<Matrix> params_;
};

/// Mini-batch Adam over precomputed features. Returns the per-epoch mean loss.
std::vector<double> train_meta(MetaModel& model, const std::vector<Vector>& features,
                               const std::vector<MetaTarget>& targets, const MetaConfig& cfg, Rng& rng);

/// Action head argmax; an api_call class is rebuilt from the slot heads and,
/// when that string is not a candidate, replaced by the api_call candidate
/// with the highest y_mat.
RerankDecision meta_predict(const MetaModel& model, std::span<const double> features, const ActionSpace& space,
                            const CandidateSet& candidates, std::span<const double> y_mat);

}  // namespace ctxrr
