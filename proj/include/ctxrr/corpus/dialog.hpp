#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxrr {

using Tokens = std::vector<std::string>;

/// Lowercases, isolates `. , ? !` as their own tokens, splits on whitespace.
Tokens tokenize(std::string_view text);
std::string join_tokens(const Tokens& tokens);

struct Turn {
  enum class Kind { kExchange, kFact };
  Kind kind = Kind::kExchange;
  std::size_t index = 0;  // leading line integer
  Tokens user;            // empty for facts
  Tokens system;          // system response, or the fact line

  bool is_exchange() const { return kind == Kind::kExchange; }
  friend bool operator==(const Turn&, const Turn&) = default;
};

struct Dialog {
  std::size_t id = 0;
  std::vector<Turn> turns;

  std::size_t exchange_count() const;
  friend bool operator==(const Dialog&, const Dialog&) = default;
};

/// Parses bAbI-dialog text: blank lines separate dialogs; each line is
/// `<int> <payload>`, a payload with one TAB is `user<TAB>system`, a payload
/// without TAB is a fact. Throws ParseError carrying the offending line.
std::vector<Dialog> parse_dialog_file(std::string_view text);
std::string serialize_dialogs(const std::vector<Dialog>& dialogs);

/// The N fixed system responses.
class CandidateSet {
 public:
  CandidateSet() = default;
  explicit CandidateSet(std::vector<Tokens> candidates);

  std::size_t size() const { return candidates_.size(); }
  const Tokens& operator[](std::size_t i) const { return candidates_[i]; }
  const std::vector<Tokens>& all() const { return candidates_; }
  /// Space-joined normalized text of candidate i.
  const std::string& text(std::size_t i) const { return texts_[i]; }
  std::optional<std::size_t> find(const Tokens& response) const;

 private:
  std::vector<Tokens> candidates_;
  std::vector<std::string> texts_;
  std::map<std::string, std::size_t> index_;
};

/// One `<int> <response>` per non-blank line. Throws ParseError on duplicate
/// responses (naming both lines) or when fewer than two candidates remain.
CandidateSet load_candidates(std::string_view text);
std::string serialize_candidates(const CandidateSet& candidates);

/// One supervised example per exchange.
struct RankingInstance {
  std::vector<Tokens> history;  // every line before the current exchange
  Tokens query;
  std::size_t gold = 0;
  std::size_t turn_count = 1;  // 1-based exchange index within the dialog
  std::size_t dialog_id = 0;
};

/// Throws DataError listing the response text when a system turn is not a candidate.
std::vector<RankingInstance> expand_instances(const Dialog& dialog, const CandidateSet& candidates);
std::vector<RankingInstance> expand_all(const std::vector<Dialog>& dialogs,
                                        const CandidateSet& candidates);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace ctxrr
