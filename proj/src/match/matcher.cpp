#include "ctxrr/match/matcher.hpp"

#include "ctxrr/match/neural.hpp"
#include "ctxrr/match/nn.hpp"
#include "ctxrr/match/tfidf.hpp"
#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

namespace {

struct KindInfo {
  MatcherKind kind;
  std::string_view name;
  std::string_view tag;
};

constexpr KindInfo kKinds[] = {
    {MatcherKind::kTfidf, "tfidf", "MAT_TFIDF"}, {MatcherKind::kNn, "nn", "MAT_NN"},
    {MatcherKind::kSlemb, "slemb", "MAT_SLEMB"}, {MatcherKind::kMmn, "mmn", "MAT_MMN"},
    {MatcherKind::kQalstm, "qalstm", "MAT_QALSTM"},
};

const KindInfo& info(MatcherKind kind) {
  for (const auto& k : kKinds)
    if (k.kind == kind) return k;
  throw DataError("unknown matcher kind");
}

}  // namespace

std::string_view matcher_name(MatcherKind kind) { return info(kind).name; }
std::string_view matcher_tag(MatcherKind kind) { return info(kind).tag; }

MatcherKind parse_matcher_kind(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  throw DataError("unknown matcher: " + std::string(name) + " (expected tfidf, nn, slemb, mmn or qalstm)");
}

bool provides_embeddings(MatcherKind kind) { return kind == MatcherKind::kMmn || kind == MatcherKind::kQalstm; }

std::string candidates_meta(const CandidateSet& candidates) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) out += candidates.text(i) + '\n';
  return out;
}

CandidateSet candidates_from_meta(const ModelContainer& c) {
  std::vector<Tokens> cands;
  const std::string& text = c.meta_value("candidates");
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    cands.push_back(tokenize(text.substr(start, nl - start)));
    start = nl == std::string::npos ? text.size() : nl + 1;
  }
  return CandidateSet(std::move(cands));
}

std::unique_ptr<Matcher> train_matcher(MatcherKind kind, const std::vector<RankingInstance>& train,
                                       const CandidateSet& candidates, const MatchConfig& cfg,
                                       std::uint64_t seed) {
  if (train.empty()) throw DataError("matcher training: no training instances");
  Rng rng(seed);
  switch (kind) {
    case MatcherKind::kTfidf:
      return std::make_unique<TfidfMatcher>(fit_tfidf(train, candidates), candidates);
    case MatcherKind::kNn:
      return std::make_unique<NnMatcher>(fit_nn(train), candidates);
    case MatcherKind::kSlemb: {
      auto m = std::make_unique<SlembMatcher>(slemb_vocabulary(train, candidates), candidates, cfg, rng);
      m->set_loss_trace(train_margin(*m, train, cfg, rng));
      return m;
    }
    case MatcherKind::kMmn: {
      auto m = std::make_unique<MmnMatcher>(mmn_vocabulary(train, candidates, cfg), candidates, cfg, rng);
      m->set_loss_trace(train_margin(*m, train, cfg, rng));
      return m;
    }
    case MatcherKind::kQalstm: {
      auto m = std::make_unique<QaLstmMatcher>(qalstm_vocabulary(train, candidates), candidates, cfg, rng);
      m->set_loss_trace(train_margin(*m, train, cfg, rng));
      return m;
    }
  }
  throw DataError("unknown matcher kind");
}

std::unique_ptr<Matcher> load_matcher(const ModelContainer& c) {
  if (c.kind == matcher_tag(MatcherKind::kTfidf)) return TfidfMatcher::from_container(c);
  if (c.kind == matcher_tag(MatcherKind::kNn)) return NnMatcher::from_container(c);
  if (c.kind == matcher_tag(MatcherKind::kSlemb)) return SlembMatcher::from_container(c);
  if (c.kind == matcher_tag(MatcherKind::kMmn)) return MmnMatcher::from_container(c);
  if (c.kind == matcher_tag(MatcherKind::kQalstm)) return QaLstmMatcher::from_container(c);
  throw DataError("not a matcher model: " + c.kind);
}

}  // namespace ctxrr
