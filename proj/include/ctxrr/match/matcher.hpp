#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctxrr/corpus/dialog.hpp"
#include "ctxrr/numeric/container.hpp"
#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr {

enum class MatcherKind { kTfidf, kNn, kSlemb, kMmn, kQalstm };

/// CLI spelling: tfidf, nn, slemb, mmn, qalstm.
std::string_view matcher_name(MatcherKind kind);
/// Container tag: MAT_TFIDF, MAT_NN, MAT_SLEMB, MAT_MMN, MAT_QALSTM.
std::string_view matcher_tag(MatcherKind kind);
/// Throws DataError on an unknown name.
MatcherKind parse_matcher_kind(std::string_view name);
/// Only MMN and QA-LSTM expose context/answer embeddings.
bool provides_embeddings(MatcherKind kind);

struct MatchOutput {
  Vector y_mat;                 // one score per candidate, higher is better
  std::optional<Vector> e_ctx;  // dialog context embedding
  std::optional<Vector> e_ans;  // embedding of the top-scoring candidate
};

struct MatchConfig {
  std::size_t dim = 128;
  std::size_t hops = 3;     // MMN
  std::size_t hidden = 64;  // QA-LSTM, per direction
  double margin = 0.5;
  std::size_t epochs = 20;
  std::size_t batch = 32;
  double lr = 0.001;
  std::size_t neg_tries = 100;
  std::size_t max_len = 200;  // QA-LSTM context tokens
  bool temporal = true;       // MMN memories
  std::size_t max_memory = 50;
  double clip_norm = 40.0;
  double init_scale = 0.1;

  friend bool operator==(const MatchConfig&, const MatchConfig&) = default;
};

/// A frozen scorer over a fixed candidate set. score() is reentrant.
class Matcher {
 public:
  virtual ~Matcher() = default;
  virtual MatcherKind kind() const = 0;
  virtual MatchOutput score(const RankingInstance& inst) const = 0;
  virtual ModelContainer to_container() const = 0;
  /// Width of e_ctx / e_ans, or 0 when the matcher has none.
  virtual std::size_t embedding_dim() const { return 0; }
  /// Mean training loss per epoch; empty for non-learned matchers.
  const std::vector<double>& loss_trace() const { return loss_trace_; }
  void set_loss_trace(std::vector<double> t) { loss_trace_ = std::move(t); }

 protected:
  std::vector<double> loss_trace_;
};

std::unique_ptr<Matcher> train_matcher(MatcherKind kind, const std::vector<RankingInstance>& train,
                                       const CandidateSet& candidates, const MatchConfig& cfg,
                                       std::uint64_t seed);
std::unique_ptr<Matcher> load_matcher(const ModelContainer& c);

/// Candidate texts stored alongside a model, and their inverse.
std::string candidates_meta(const CandidateSet& candidates);
CandidateSet candidates_from_meta(const ModelContainer& c);

}  // namespace ctxrr
