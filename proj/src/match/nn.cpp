#include "ctxrr/match/nn.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

Tokens token_set(const Tokens& tokens) {
  Tokens s = tokens;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

namespace {

std::size_t overlap(const Tokens& a, const Tokens& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n, ++i, ++j;
    }
  }
  return n;
}

void order_responses(PairEntry& e) {
  // stable: equal frequencies keep first-occurrence order
  std::stable_sort(e.responses.begin(), e.responses.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
}

}  // namespace

PairTable fit_nn(const std::vector<RankingInstance>& train) {
  PairTable table;
  std::map<Tokens, std::size_t> index;
  for (const auto& inst : train) {
    Tokens key = token_set(inst.query);
    auto [it, fresh] = index.try_emplace(key, table.entries.size());
    if (fresh) table.entries.push_back({std::move(key), {}, 0});
    PairEntry& e = table.entries[it->second];
    auto r = std::find_if(e.responses.begin(), e.responses.end(),
                          [&](const auto& p) { return p.first == inst.gold; });
    if (r == e.responses.end()) {
      e.responses.emplace_back(inst.gold, 1);
    } else {
      ++r->second;
    }
    ++e.total;
  }
  for (auto& e : table.entries) order_responses(e);
  return table;
}

MatchOutput score_nn(const RankingInstance& inst, const CandidateSet& candidates, const PairTable& table) {
  MatchOutput out;
  out.y_mat.assign(candidates.size(), 0.0);
  const Tokens q = token_set(inst.query);
  const PairEntry* best = nullptr;
  std::size_t best_overlap = 0;
  for (const auto& e : table.entries) {
    const std::size_t o = overlap(q, e.key);
    // strict comparisons keep the earliest entry on a full tie
    if (o > best_overlap || (o == best_overlap && best && o > 0 && e.total > best->total)) {
      best = &e;
      best_overlap = o;
    }
  }
  if (!best || best_overlap == 0) return out;
  for (const auto& [id, freq] : best->responses)
    if (id < out.y_mat.size()) out.y_mat[id] = static_cast<double>(freq);
  return out;
}

NnMatcher::NnMatcher(PairTable table, CandidateSet candidates)
    : table_(std::move(table)), candidates_(std::move(candidates)) {}

MatchOutput NnMatcher::score(const RankingInstance& inst) const { return score_nn(inst, candidates_, table_); }

ModelContainer NnMatcher::to_container() const {
  ModelContainer c;
  c.kind = std::string(matcher_tag(MatcherKind::kNn));
  c.set_meta("candidates", candidates_meta(candidates_));
  // key tokens<TAB>id:freq id:freq ...
  std::ostringstream os;
  for (const auto& e : table_.entries) {
    os << join_tokens(e.key) << '\t';
    for (std::size_t i = 0; i < e.responses.size(); ++i)
      os << (i ? " " : "") << e.responses[i].first << ':' << e.responses[i].second;
    os << '\n';
  }
  c.set_meta("pairs", os.str());
  return c;
}

std::unique_ptr<NnMatcher> NnMatcher::from_container(const ModelContainer& c) {
  if (c.kind != matcher_tag(MatcherKind::kNn)) throw DataError("not a NN model: " + c.kind);
  PairTable table;
  std::istringstream is(c.meta_value("pairs"));
  std::string line;
  while (std::getline(is, line)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("NN model: malformed pair entry");
    PairEntry e;
    e.key = tokenize(line.substr(0, tab));
    std::istringstream rs(line.substr(tab + 1));
    std::string item;
    while (rs >> item) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw DataError("NN model: malformed response entry");
      const std::size_t id = std::stoul(item.substr(0, colon));
      const std::size_t freq = std::stoul(item.substr(colon + 1));
      e.responses.emplace_back(id, freq);
      e.total += freq;
    }
    table.entries.push_back(std::move(e));
  }
  return std::make_unique<NnMatcher>(std::move(table), candidates_from_meta(c));
}

}  // namespace ctxrr
