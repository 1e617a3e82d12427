#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctxrr/corpus/dialog.hpp"

namespace ctxrr {

/// Token <-> id map. Id 0 is padding and has no token; id 1 is `<unk>`, which
/// every out-of-vocabulary token maps to.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  /// Adds `token` if new and returns its id.
  std::size_t add(const std::string& token);
  std::size_t id(const std::string& token) const;
  bool contains(const std::string& token) const { return ids_.count(token) != 0; }
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  /// V: number of mapped tokens plus the padding slot.
  std::size_t size() const { return tokens_.size(); }

  std::vector<std::size_t> encode(const Tokens& tokens) const;

  /// Newline-separated tokens in id order, starting from id 1.
  std::string serialize() const;
  static Vocabulary deserialize(std::string_view text);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;  // tokens_[0] is the empty padding entry
  std::unordered_map<std::string, std::size_t> ids_;
};

/// Sorted vocabulary over every token of the instances (history, query) and
/// candidates, plus `extra` tokens.
Vocabulary build_vocabulary(const std::vector<RankingInstance>& instances,
                            const CandidateSet& candidates, const Tokens& extra = {});

}  // namespace ctxrr
