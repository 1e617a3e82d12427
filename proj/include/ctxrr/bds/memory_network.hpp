#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ctxrr/corpus/dialog.hpp"
#include "ctxrr/corpus/vocabulary.hpp"
#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr::memnet {

/// Token-id view of one (history, query) pair.
struct EncodedInput {
  std::vector<std::vector<std::size_t>> memories;
  std::vector<std::size_t> query;
};

/// Recency token appended to memory sentences: "#1" marks the latest line.
std::string temporal_token(std::size_t recency);
Tokens temporal_tokens(std::size_t max_memory);

/// Keeps the last `max_memory` history lines and, when `temporal` is set,
/// appends each line's recency token.
EncodedInput encode_input(const RankingInstance& inst, const Vocabulary& vocab,
                          std::size_t max_memory, bool temporal);

/// Position-encoded bag of embeddings: sum_j l_j * E[ids_j]. E is V x d.
Vector encode_sentence(const Matrix& embedding, std::span<const std::size_t> ids);
/// Accumulates into dE the gradient of encode_sentence given d(sentence vector).
void encode_sentence_backward(Matrix& d_embedding, std::span<const std::size_t> ids,
                              std::span<const double> d_vec);

enum class Attention {
  kDot,         // p = softmax(u . m_i)
  kNormalized,  // p = softmax(u/|u| . m_i/|m_i|)
};

struct HopTrace {
  Vector u;                  // controller state entering the hop
  std::vector<Vector> m, c;  // input and output memory vectors
  Vector p;                  // attention
  Vector o;                  // read vector
};

struct Trace {
  Vector u1;  // query embedding
  std::vector<HopTrace> hops;
  Vector u_final;
};

/// Runs K = stack.size() - 1 hops with adjacent tying: hop k reads input
/// memories with stack[k] and output memories with stack[k+1]; the query is
/// embedded with stack[0]. With no memories every read is the zero vector.
Vector forward(std::span<const Matrix> stack, const EncodedInput& in, Attention att, Trace* trace);

/// Backward of forward() given d(u_final). Accumulates into d_stack.
void backward(std::span<const Matrix> stack, std::span<Matrix> d_stack, const EncodedInput& in,
              Attention att, const Trace& trace, std::span<const double> d_u_final);

}  // namespace ctxrr::memnet
