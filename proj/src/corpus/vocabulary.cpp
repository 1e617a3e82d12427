#include "ctxrr/corpus/vocabulary.hpp"

#include <set>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

Vocabulary::Vocabulary() {
  tokens_.emplace_back();
  add(std::string(kUnkToken));
}

std::size_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

std::size_t Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

std::vector<std::size_t> Vocabulary::encode(const Tokens& tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::string Vocabulary::serialize() const {
  std::string s;
  for (std::size_t i = 1; i < tokens_.size(); ++i) {
    s += tokens_[i];
    s.push_back('\n');
  }
  return s;
}

Vocabulary Vocabulary::deserialize(std::string_view text) {
  Vocabulary v;
  std::size_t start = 0;
  std::size_t expected = 1;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string tok(text.substr(start, end - start));
    if (v.add(tok) != expected) throw DataError("vocabulary: duplicate or misplaced token " + tok);
    ++expected;
    start = end + 1;
  }
  return v;
}

Vocabulary build_vocabulary(const std::vector<RankingInstance>& instances,
                            const CandidateSet& candidates, const Tokens& extra) {
  std::set<std::string> all(extra.begin(), extra.end());
  for (const auto& inst : instances) {
    for (const auto& s : inst.history) all.insert(s.begin(), s.end());
    all.insert(inst.query.begin(), inst.query.end());
  }
  for (const auto& c : candidates.all()) all.insert(c.begin(), c.end());
  all.erase(std::string(Vocabulary::kUnkToken));
  Vocabulary v;
  for (const auto& t : all) v.add(t);
  return v;
}

}  // namespace ctxrr
