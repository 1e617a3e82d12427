#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ctxrr/corpus/dialog.hpp"

namespace ctxrr {

inline constexpr std::string_view kApiCallToken = "api_call";

/// api_call argument positions and the values each may take.
struct SlotSchema {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> values;

  std::size_t arity() const { return names.size(); }
  std::optional<std::size_t> value_index(std::size_t slot, const std::string& value) const;

  /// Per-position sorted value lists from every api_call candidate. Throws
  /// DataError when api_call candidates disagree on arity.
  static SlotSchema from_candidates(const CandidateSet& candidates);

  friend bool operator==(const SlotSchema&, const SlotSchema&) = default;
};

/// Collapsed response class: a plain response keeps its candidate id, every
/// api_call becomes one class carrying its positional slot values.
struct SimplifiedAction {
  enum class Kind { kPlain, kApiCall };
  Kind kind = Kind::kPlain;
  std::size_t candidate = 0;  // meaningful for kPlain only
  std::vector<std::string> slots;

  bool is_api_call() const { return kind == Kind::kApiCall; }
};

bool is_api_call(const Tokens& response);

/// Throws DataError on an api_call whose argument count differs from the arity.
SimplifiedAction simplify_action(const Tokens& candidate, std::size_t candidate_id,
                                 const SlotSchema& schema);

/// Dense class indexing over simplified actions: one class per plain
/// candidate (in candidate order) followed by a single api_call class.
class ActionSpace {
 public:
  ActionSpace(const CandidateSet& candidates, const SlotSchema& schema);

  std::size_t size() const { return plain_.size() + 1; }
  std::size_t api_class() const { return plain_.size(); }
  /// Class of candidate `id`.
  std::size_t class_of(std::size_t candidate_id) const { return class_of_[candidate_id]; }
  /// Candidate id of a plain class.
  std::size_t candidate_of(std::size_t cls) const { return plain_[cls]; }
  const SimplifiedAction& action(std::size_t candidate_id) const { return actions_[candidate_id]; }
  const std::vector<std::size_t>& api_candidates() const { return api_; }
  const SlotSchema& schema() const { return schema_; }

 private:
  SlotSchema schema_;
  std::vector<std::size_t> plain_;
  std::vector<std::size_t> api_;
  std::vector<std::size_t> class_of_;
  std::vector<SimplifiedAction> actions_;
};

}  // namespace ctxrr
