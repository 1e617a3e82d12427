#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ctxrr/bds/memory_network.hpp"
#include "ctxrr/corpus/dialog.hpp"
#include "ctxrr/corpus/vocabulary.hpp"
#include "ctxrr/numeric/container.hpp"
#include "ctxrr/numeric/random.hpp"

namespace ctxrr {

inline constexpr std::string_view kBdsKind = "BDS_MEMNN";

struct BdsConfig {
  std::size_t dim = 128;
  std::size_t hops = 3;
  std::size_t epochs = 20;
  std::size_t batch = 32;
  double lr = 0.01;
  bool temporal = true;
  std::size_t max_memory = 50;
  double clip_norm = 40.0;
  double init_scale = 0.1;

  friend bool operator==(const BdsConfig&, const BdsConfig&) = default;
};

struct BdsOutput {
  Vector y_bds;          // softmax over the N candidates
  Vector context_state;  // u^{K+1}
};

/// End-to-end memory network scoring the N candidates through W.
///
/// Stores K+1 embedding tables A^1..A^{K+1} (each V x d, one row per token)
/// and W (N x d). Adjacent tying is structural: B() is A(0) and C(k) is
/// A(k+1), returning references to the same tensors.
class MemNN {
 public:
  MemNN(Vocabulary vocab, std::size_t n_candidates, const BdsConfig& cfg, Rng& rng);

  const Vocabulary& vocab() const { return vocab_; }
  std::size_t hops() const { return hops_; }
  std::size_t dim() const { return dim_; }
  std::size_t n_candidates() const { return tensors_.back().rows(); }
  bool temporal() const { return temporal_; }
  std::size_t max_memory() const { return max_memory_; }

  Matrix& A(std::size_t k) { return tensors_.at(k); }
  const Matrix& A(std::size_t k) const { return tensors_.at(k); }
  const Matrix& B() const { return tensors_.at(0); }
  const Matrix& C(std::size_t k) const { return tensors_.at(k + 1); }
  Matrix& C(std::size_t k) { return tensors_.at(k + 1); }
  const Matrix& W() const { return tensors_.back(); }

  /// Flat parameter list: A^1..A^{K+1}, W.
  std::vector<Matrix>& tensors() { return tensors_; }
  const std::vector<Matrix>& tensors() const { return tensors_; }

  memnet::EncodedInput encode(const RankingInstance& inst) const;
  BdsOutput forward(const memnet::EncodedInput& in, memnet::Trace* trace = nullptr) const;

  /// Cross-entropy of the gold candidate; accumulates gradients when given.
  double loss(const memnet::EncodedInput& in, std::size_t gold, std::vector<Matrix>* grads) const;

  ModelContainer to_container() const;
  static MemNN from_container(const ModelContainer& c);

 private:
  MemNN() = default;
  Vocabulary vocab_;
  std::size_t dim_ = 0;
  std::size_t hops_ = 0;
  bool temporal_ = true;
  std::size_t max_memory_ = 50;
  std::vector<Matrix> tensors_;
};

/// Vocabulary with every token a BDS over these instances needs.
Vocabulary bds_vocabulary(const std::vector<RankingInstance>& instances,
                          const CandidateSet& candidates, const BdsConfig& cfg);

BdsOutput bds_forward(const RankingInstance& inst, const MemNN& model);
Vector bds_predict(const RankingInstance& inst, const MemNN& model);

struct BdsTrainResult {
  MemNN model;
  std::vector<double> loss_trace;  // mean training loss per epoch
};

/// Mini-batch Adam on cross-entropy. Deterministic for a fixed seed.
BdsTrainResult train_bds(const std::vector<RankingInstance>& train, const CandidateSet& candidates,
                         const BdsConfig& cfg, std::uint64_t seed);

}  // namespace ctxrr
