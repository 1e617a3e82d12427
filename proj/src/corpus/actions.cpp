#include "ctxrr/corpus/actions.hpp"

#include <algorithm>
#include <set>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

std::optional<std::size_t> SlotSchema::value_index(std::size_t slot, const std::string& value) const {
  const auto& vs = values.at(slot);
  auto it = std::find(vs.begin(), vs.end(), value);
  if (it == vs.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vs.begin());
}

SlotSchema SlotSchema::from_candidates(const CandidateSet& candidates) {
  std::optional<std::size_t> arity;
  std::vector<std::set<std::string>> seen;
  for (const auto& c : candidates.all()) {
    if (!is_api_call(c)) continue;
    const std::size_t a = c.size() - 1;
    if (!arity) {
      arity = a;
      seen.resize(a);
    } else if (*arity != a) {
      throw DataError("api_call candidates disagree on arity: " + join_tokens(c));
    }
    for (std::size_t s = 0; s < a; ++s) seen[s].insert(c[s + 1]);
  }
  SlotSchema schema;
  for (std::size_t s = 0; s < seen.size(); ++s) {
    schema.names.push_back("slot" + std::to_string(s + 1));
    schema.values.emplace_back(seen[s].begin(), seen[s].end());
  }
  return schema;
}

bool is_api_call(const Tokens& response) {
  return !response.empty() && response.front() == kApiCallToken;
}

SimplifiedAction simplify_action(const Tokens& candidate, std::size_t candidate_id,
                                 const SlotSchema& schema) {
  SimplifiedAction a;
  a.candidate = candidate_id;
  if (!is_api_call(candidate)) return a;
  if (candidate.size() - 1 != schema.arity())
    throw DataError("api_call with " + std::to_string(candidate.size() - 1) +
                    " arguments, expected " + std::to_string(schema.arity()) + ": " +
                    join_tokens(candidate));
  a.kind = SimplifiedAction::Kind::kApiCall;
  a.slots.assign(candidate.begin() + 1, candidate.end());
  return a;
}

ActionSpace::ActionSpace(const CandidateSet& candidates, const SlotSchema& schema)
    : schema_(schema) {
  class_of_.resize(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    actions_.push_back(simplify_action(candidates[i], i, schema));
    if (actions_.back().is_api_call()) {
      api_.push_back(i);
    } else {
      class_of_[i] = plain_.size();
      plain_.push_back(i);
    }
  }
  for (std::size_t i : api_) class_of_[i] = plain_.size();
}

}  // namespace ctxrr
