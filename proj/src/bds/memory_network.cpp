#include "ctxrr/bds/memory_network.hpp"

#include <algorithm>

#include "ctxrr/numeric/ops.hpp"

namespace ctxrr::memnet {

std::string temporal_token(std::size_t recency) { return "#" + std::to_string(recency); }

Tokens temporal_tokens(std::size_t max_memory) {
  Tokens t;
  for (std::size_t i = 1; i <= max_memory; ++i) t.push_back(temporal_token(i));
  return t;
}

EncodedInput encode_input(const RankingInstance& inst, const Vocabulary& vocab,
                          std::size_t max_memory, bool temporal) {
  EncodedInput in;
  const std::size_t n = inst.history.size();
  const std::size_t first = n > max_memory ? n - max_memory : 0;
  for (std::size_t i = first; i < n; ++i) {
    auto ids = vocab.encode(inst.history[i]);
    if (temporal) ids.push_back(vocab.id(temporal_token(n - i)));
    in.memories.push_back(std::move(ids));
  }
  in.query = vocab.encode(inst.query);
  return in;
}

Vector encode_sentence(const Matrix& embedding, std::span<const std::size_t> ids) {
  const std::size_t d = embedding.cols();
  Vector out(d, 0.0);
  const double J = static_cast<double>(ids.size());
  const double dd = static_cast<double>(d);
  for (std::size_t j = 1; j <= ids.size(); ++j) {
    const auto row = embedding.row(ids[j - 1]);
    const double a = 1.0 - j / J;
    const double b = 1.0 - 2.0 * j / J;
    for (std::size_t k = 1; k <= d; ++k) out[k - 1] += (a - (k / dd) * b) * row[k - 1];
  }
  return out;
}

void encode_sentence_backward(Matrix& d_embedding, std::span<const std::size_t> ids,
                              std::span<const double> d_vec) {
  const std::size_t d = d_embedding.cols();
  const double J = static_cast<double>(ids.size());
  const double dd = static_cast<double>(d);
  for (std::size_t j = 1; j <= ids.size(); ++j) {
    auto row = d_embedding.row(ids[j - 1]);
    const double a = 1.0 - j / J;
    const double b = 1.0 - 2.0 * j / J;
    for (std::size_t k = 1; k <= d; ++k) row[k - 1] += (a - (k / dd) * b) * d_vec[k - 1];
  }
}

namespace {

Vector attention_scores(const Vector& u, const std::vector<Vector>& m, Attention att) {
  Vector s(m.size());
  if (att == Attention::kDot) {
    for (std::size_t i = 0; i < m.size(); ++i) s[i] = dot(u, m[i]);
  } else {
    const auto uh = l2_normalize(u);
    for (std::size_t i = 0; i < m.size(); ++i) s[i] = dot(uh, l2_normalize(m[i]));
  }
  return s;
}

}  // namespace

Vector forward(std::span<const Matrix> stack, const EncodedInput& in, Attention att, Trace* trace) {
  const std::size_t hops = stack.size() - 1;
  const std::size_t d = stack[0].cols();
  Vector u = encode_sentence(stack[0], in.query);
  if (trace) {
    trace->u1 = u;
    trace->hops.clear();
  }
  if (!in.memories.empty()) {
    for (std::size_t k = 0; k < hops; ++k) {
      HopTrace h;
      h.u = u;
      for (const auto& ids : in.memories) {
        h.m.push_back(encode_sentence(stack[k], ids));
        h.c.push_back(encode_sentence(stack[k + 1], ids));
      }
      h.p = softmax(attention_scores(u, h.m, att));
      h.o.assign(d, 0.0);
      for (std::size_t i = 0; i < h.c.size(); ++i) axpy(h.p[i], h.c[i], h.o);
      axpy(1.0, h.o, u);
      if (trace) trace->hops.push_back(std::move(h));
    }
  }
  if (trace) trace->u_final = u;
  return u;
}

void backward(std::span<const Matrix> stack, std::span<Matrix> d_stack, const EncodedInput& in,
              Attention att, const Trace& trace, std::span<const double> d_u_final) {
  const std::size_t d = stack[0].cols();
  Vector du(d_u_final.begin(), d_u_final.end());
  for (std::size_t k = trace.hops.size(); k-- > 0;) {
    const HopTrace& h = trace.hops[k];
    const std::size_t n = h.m.size();
    // u_{k+1} = u_k + sum_i p_i c_i; du flows to do unchanged.
    Vector dp(n);
    for (std::size_t i = 0; i < n; ++i) {
      dp[i] = dot(h.c[i], du);
      Vector dc(d);
      for (std::size_t j = 0; j < d; ++j) dc[j] = h.p[i] * du[j];
      encode_sentence_backward(d_stack[k + 1], in.memories[i], dc);
    }
    const Vector ds = softmax_backward(h.p, dp);
    Vector du_prev = du;
    if (att == Attention::kDot) {
      for (std::size_t i = 0; i < n; ++i) {
        axpy(ds[i], h.m[i], du_prev);
        Vector dm(d);
        for (std::size_t j = 0; j < d; ++j) dm[j] = ds[i] * h.u[j];
        encode_sentence_backward(d_stack[k], in.memories[i], dm);
      }
    } else {
      const Vector uh = l2_normalize(h.u);
      Vector duh(d, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const Vector mh = l2_normalize(h.m[i]);
        axpy(ds[i], mh, duh);
        Vector dmh(d);
        for (std::size_t j = 0; j < d; ++j) dmh[j] = ds[i] * uh[j];
        Vector dm(d, 0.0);
        l2_normalize_backward(h.m[i], dmh, dm);
        encode_sentence_backward(d_stack[k], in.memories[i], dm);
      }
      l2_normalize_backward(h.u, duh, du_prev);
    }
    du = std::move(du_prev);
  }
  encode_sentence_backward(d_stack[0], in.query, du);
}

}  // namespace ctxrr::memnet
