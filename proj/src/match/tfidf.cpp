#include "ctxrr/match/tfidf.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

double IdfTable::operator()(const std::string& term) const {
  const auto it = idf.find(term);
  if (it != idf.end()) return it->second;
  // df = 0
  return std::log((1.0 + documents) / 1.0) + 1.0;
}

namespace {

std::vector<const Tokens*> instance_document(const RankingInstance& inst) {
  std::vector<const Tokens*> doc;
  for (const auto& h : inst.history) doc.push_back(&h);
  doc.push_back(&inst.query);
  return doc;
}

double sparse_norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& [_, x] : v) s += x * x;
  return std::sqrt(s);
}

double sparse_cosine(const SparseVector& a, double na, const SparseVector& b, double nb) {
  if (na == 0.0 || nb == 0.0) return 0.0;
  const SparseVector& small = a.size() < b.size() ? a : b;
  const SparseVector& large = a.size() < b.size() ? b : a;
  double s = 0.0;
  for (const auto& [t, x] : small) {
    const auto it = large.find(t);
    if (it != large.end()) s += x * it->second;
  }
  return s / (na * nb);
}

}  // namespace

IdfTable fit_tfidf(const std::vector<RankingInstance>& train, const CandidateSet& candidates) {
  std::map<std::string, std::size_t> df;
  auto count_doc = [&](const std::vector<const Tokens*>& doc) {
    std::set<std::string> seen;
    for (const Tokens* s : doc) seen.insert(s->begin(), s->end());
    for (const auto& t : seen) ++df[t];
  };
  for (const auto& inst : train) count_doc(instance_document(inst));
  for (const auto& c : candidates.all()) count_doc({&c});

  IdfTable table;
  table.documents = train.size() + candidates.size();
  const double D = static_cast<double>(table.documents);
  for (const auto& [t, n] : df) table.idf[t] = std::log((1.0 + D) / (1.0 + n)) + 1.0;
  return table;
}

SparseVector tfidf_vector(const std::vector<const Tokens*>& document, const IdfTable& idf) {
  SparseVector v;
  for (const Tokens* s : document)
    for (const auto& t : *s) v[t] += 1.0;
  for (auto& [t, x] : v) x *= idf(t);
  return v;
}

MatchOutput score_tfidf(const RankingInstance& inst, const CandidateSet& candidates, const IdfTable& idf) {
  const auto q = tfidf_vector(instance_document(inst), idf);
  const double nq = sparse_norm(q);
  MatchOutput out;
  out.y_mat.resize(candidates.size());
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const auto c = tfidf_vector({&candidates[j]}, idf);
    out.y_mat[j] = sparse_cosine(q, nq, c, sparse_norm(c));
  }
  return out;
}

TfidfMatcher::TfidfMatcher(IdfTable idf, CandidateSet candidates)
    : idf_(std::move(idf)), candidates_(std::move(candidates)) {
  for (const auto& c : candidates_.all()) {
    cand_vecs_.push_back(tfidf_vector({&c}, idf_));
    cand_norms_.push_back(sparse_norm(cand_vecs_.back()));
  }
}

MatchOutput TfidfMatcher::score(const RankingInstance& inst) const {
  const auto q = tfidf_vector(instance_document(inst), idf_);
  const double nq = sparse_norm(q);
  MatchOutput out;
  out.y_mat.resize(cand_vecs_.size());
  for (std::size_t j = 0; j < cand_vecs_.size(); ++j)
    out.y_mat[j] = sparse_cosine(q, nq, cand_vecs_[j], cand_norms_[j]);
  return out;
}

ModelContainer TfidfMatcher::to_container() const {
  ModelContainer c;
  c.kind = std::string(matcher_tag(MatcherKind::kTfidf));
  c.set_meta("candidates", candidates_meta(candidates_));
  c.set_meta("documents", std::to_string(idf_.documents));
  // term<TAB>idf, idf in hex float so the round trip is exact
  std::ostringstream os;
  os << std::hexfloat;
  for (const auto& [t, x] : idf_.idf) os << t << '\t' << x << '\n';
  c.set_meta("idf", os.str());
  return c;
}

std::unique_ptr<TfidfMatcher> TfidfMatcher::from_container(const ModelContainer& c) {
  if (c.kind != matcher_tag(MatcherKind::kTfidf)) throw DataError("not a tf-idf model: " + c.kind);
  IdfTable idf;
  idf.documents = std::stoul(c.meta_value("documents"));
  std::istringstream is(c.meta_value("idf"));
  std::string line;
  while (std::getline(is, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("tf-idf model: malformed idf entry");
    idf.idf[line.substr(0, tab)] = std::strtod(line.c_str() + tab + 1, nullptr);
  }
  return std::make_unique<TfidfMatcher>(std::move(idf), candidates_from_meta(c));
}

}  // namespace ctxrr
