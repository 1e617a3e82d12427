#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctxrr/numeric/random.hpp"
#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr {

/// Tensor layout of one gated recurrent cell inside a flat parameter list:
/// Wz Wr Wh (hidden x input), Uz Ur Uh (hidden x hidden), bz br bh (hidden x 1).
///
///   z  = sigmoid(Wz x + Uz h + bz)
///   r  = sigmoid(Wr x + Ur h + br)
///   c  = tanh(Wh x + Uh (r * h) + bh)
///   h' = (1 - z) * h + z * c
inline constexpr std::size_t kGruTensors = 9;
/// A bidirectional encoder is the forward cell followed by the backward cell.
inline constexpr std::size_t kBiGruTensors = 2 * kGruTensors;

struct GruShape {
  std::size_t input = 0;
  std::size_t hidden = 0;
};

/// Appends kGruTensors freshly initialized tensors to `params`.
void append_gru_params(std::vector<Matrix>& params, GruShape shape, Rng& rng, double scale = 0.1);

/// Saved activations of one unidirectional pass.
struct GruTrace {
  Matrix inputs;  // T x input
  Matrix states;  // (T + 1) x hidden, row 0 is the zero initial state
  Matrix z, r, c;  // T x hidden
};

/// Runs the cell over the rows of `inputs`; returns T x hidden states.
Matrix gru_forward(std::span<const Matrix> cell, const Matrix& inputs, GruTrace* trace);

/// Backpropagates d(states) (T x hidden) through one pass. Accumulates weight
/// gradients into `grad_cell` and input gradients into `d_inputs` (T x input).
void gru_backward(std::span<const Matrix> cell, std::span<Matrix> grad_cell,
                  const GruTrace& trace, const Matrix& d_states, Matrix& d_inputs);

struct BiGruTrace {
  GruTrace fwd;
  GruTrace bwd;  // over the reversed sequence
};

/// Bidirectional encoding: row t is [fwd_t ; bwd_t], each `hidden` wide.
Matrix birnn_encode(std::span<const Matrix> params, const Matrix& inputs, BiGruTrace* trace);

/// Backward of birnn_encode given d(outputs) (T x 2*hidden).
void birnn_backward(std::span<const Matrix> params, std::span<Matrix> grads,
                    const BiGruTrace& trace, const Matrix& d_outputs, Matrix& d_inputs);

}  // namespace ctxrr
