#include "ctxrr/numeric/gru.hpp"

#include <cassert>
#include <cmath>

#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

namespace {

enum : std::size_t { kWz, kWr, kWh, kUz, kUr, kUh, kBz, kBr, kBh };

Matrix reversed_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto src = m.row(m.rows() - 1 - r);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

}  // namespace

void append_gru_params(std::vector<Matrix>& params, GruShape shape, Rng& rng, double scale) {
  const std::size_t h = shape.hidden;
  const std::size_t d = shape.input;
  for (int i = 0; i < 3; ++i) params.emplace_back(h, d);
  for (int i = 0; i < 3; ++i) params.emplace_back(h, h);
  for (int i = 0; i < 3; ++i) params.emplace_back(h, 1);
  for (std::size_t i = params.size() - kGruTensors; i < params.size(); ++i)
    init_uniform(params[i], rng, scale);
}

Matrix gru_forward(std::span<const Matrix> cell, const Matrix& inputs, GruTrace* trace) {
  assert(cell.size() == kGruTensors);
  const std::size_t T = inputs.rows();
  const std::size_t h = cell[kUz].rows();
  Matrix states(T + 1, h);
  Matrix z(T, h), r(T, h), c(T, h);
  Vector az(h), ar(h), ah(h), rh(h);
  for (std::size_t t = 0; t < T; ++t) {
    auto x = inputs.row(t);
    auto hp = states.row(t);
    for (std::size_t i = 0; i < h; ++i) {
      az[i] = cell[kBz].data()[i];
      ar[i] = cell[kBr].data()[i];
      ah[i] = cell[kBh].data()[i];
    }
    matvec_add(cell[kWz], x, az);
    matvec_add(cell[kUz], hp, az);
    matvec_add(cell[kWr], x, ar);
    matvec_add(cell[kUr], hp, ar);
    auto zt = z.row(t);
    auto rt = r.row(t);
    for (std::size_t i = 0; i < h; ++i) {
      zt[i] = sigmoid(az[i]);
      rt[i] = sigmoid(ar[i]);
      rh[i] = rt[i] * hp[i];
    }
    matvec_add(cell[kWh], x, ah);
    matvec_add(cell[kUh], rh, ah);
    auto ct = c.row(t);
    auto hn = states.row(t + 1);
    for (std::size_t i = 0; i < h; ++i) {
      ct[i] = std::tanh(ah[i]);
      hn[i] = (1.0 - zt[i]) * hp[i] + zt[i] * ct[i];
    }
  }
  Matrix out(T, h);
  std::copy(states.data().begin() + static_cast<std::ptrdiff_t>(h), states.data().end(),
            out.data().begin());
  if (trace) {
    trace->inputs = inputs;
    trace->states = std::move(states);
    trace->z = std::move(z);
    trace->r = std::move(r);
    trace->c = std::move(c);
  }
  return out;
}

void gru_backward(std::span<const Matrix> cell, std::span<Matrix> grad_cell,
                  const GruTrace& trace, const Matrix& d_states, Matrix& d_inputs) {
  const std::size_t T = trace.inputs.rows();
  const std::size_t h = cell[kUz].rows();
  Vector dh(h, 0.0), dz(h), dah(h), drh(h), dar(h), daz(h), dprev(h), rh(h);
  for (std::size_t t = T; t-- > 0;) {
    auto x = trace.inputs.row(t);
    auto hp = trace.states.row(t);
    auto zt = trace.z.row(t);
    auto rt = trace.r.row(t);
    auto ct = trace.c.row(t);
    auto dx = d_inputs.row(t);
    auto ds = d_states.row(t);
    for (std::size_t i = 0; i < h; ++i) dh[i] += ds[i];

    for (std::size_t i = 0; i < h; ++i) {
      dz[i] = dh[i] * (ct[i] - hp[i]);
      const double dc = dh[i] * zt[i];
      dah[i] = dc * (1.0 - ct[i] * ct[i]);
      dprev[i] = dh[i] * (1.0 - zt[i]);
      rh[i] = rt[i] * hp[i];
      drh[i] = 0.0;
    }
    outer_add(grad_cell[kWh], 1.0, dah, x);
    outer_add(grad_cell[kUh], 1.0, dah, rh);
    axpy(1.0, dah, grad_cell[kBh].data());
    matvec_t_add(cell[kWh], dah, dx);
    matvec_t_add(cell[kUh], dah, drh);

    for (std::size_t i = 0; i < h; ++i) {
      dprev[i] += drh[i] * rt[i];
      dar[i] = drh[i] * hp[i] * rt[i] * (1.0 - rt[i]);
      daz[i] = dz[i] * zt[i] * (1.0 - zt[i]);
    }
    outer_add(grad_cell[kWr], 1.0, dar, x);
    outer_add(grad_cell[kUr], 1.0, dar, hp);
    axpy(1.0, dar, grad_cell[kBr].data());
    matvec_t_add(cell[kWr], dar, dx);
    matvec_t_add(cell[kUr], dar, dprev);

    outer_add(grad_cell[kWz], 1.0, daz, x);
    outer_add(grad_cell[kUz], 1.0, daz, hp);
    axpy(1.0, daz, grad_cell[kBz].data());
    matvec_t_add(cell[kWz], daz, dx);
    matvec_t_add(cell[kUz], daz, dprev);

    dh = dprev;
  }
}

Matrix birnn_encode(std::span<const Matrix> params, const Matrix& inputs, BiGruTrace* trace) {
  assert(params.size() == kBiGruTensors);
  const std::size_t T = inputs.rows();
  const auto fwd_cell = params.subspan(0, kGruTensors);
  const auto bwd_cell = params.subspan(kGruTensors, kGruTensors);
  Matrix fwd = gru_forward(fwd_cell, inputs, trace ? &trace->fwd : nullptr);
  Matrix bwd_rev = gru_forward(bwd_cell, reversed_rows(inputs), trace ? &trace->bwd : nullptr);
  const std::size_t h = fwd.cols();
  Matrix out(T, 2 * h);
  for (std::size_t t = 0; t < T; ++t) {
    auto o = out.row(t);
    auto f = fwd.row(t);
    auto b = bwd_rev.row(T - 1 - t);
    std::copy(f.begin(), f.end(), o.begin());
    std::copy(b.begin(), b.end(), o.begin() + static_cast<std::ptrdiff_t>(h));
  }
  return out;
}

void birnn_backward(std::span<const Matrix> params, std::span<Matrix> grads,
                    const BiGruTrace& trace, const Matrix& d_outputs, Matrix& d_inputs) {
  const std::size_t T = d_outputs.rows();
  const std::size_t h = d_outputs.cols() / 2;
  Matrix d_fwd(T, h), d_bwd_rev(T, h);
  for (std::size_t t = 0; t < T; ++t) {
    auto d = d_outputs.row(t);
    std::copy(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(h), d_fwd.row(t).begin());
    std::copy(d.begin() + static_cast<std::ptrdiff_t>(h), d.end(),
              d_bwd_rev.row(T - 1 - t).begin());
  }
  gru_backward(params.subspan(0, kGruTensors), grads.subspan(0, kGruTensors), trace.fwd, d_fwd,
               d_inputs);
  Matrix d_in_rev(T, d_inputs.cols());
  gru_backward(params.subspan(kGruTensors, kGruTensors), grads.subspan(kGruTensors, kGruTensors),
               trace.bwd, d_bwd_rev, d_in_rev);
  for (std::size_t t = 0; t < T; ++t) axpy(1.0, d_in_rev.row(t), d_inputs.row(T - 1 - t));
}

}  // namespace ctxrr
