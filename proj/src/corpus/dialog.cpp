#include "ctxrr/corpus/dialog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

struct NumberedLine {
  std::size_t number;
  std::string_view payload;
};

NumberedLine split_number(std::string_view line, std::size_t lineno) {
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0) throw ParseError(lineno, "missing leading integer");
  if (i >= line.size() || line[i] != ' ') throw ParseError(lineno, "malformed line number");
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(line.data(), line.data() + i, n);
  if (ec != std::errc()) throw ParseError(lineno, "malformed line number");
  return {n, line.substr(i + 1)};
}

}  // namespace

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (ch == '.' || ch == ',' || ch == '?' || ch == '!') {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return out;
}

std::string join_tokens(const Tokens& tokens) {
  std::string s;
  for (const auto& t : tokens) {
    if (!s.empty()) s.push_back(' ');
    s += t;
  }
  return s;
}

std::size_t Dialog::exchange_count() const {
  return static_cast<std::size_t>(
      std::count_if(turns.begin(), turns.end(), [](const Turn& t) { return t.is_exchange(); }));
}

std::vector<Dialog> parse_dialog_file(std::string_view text) {
  std::vector<Dialog> dialogs;
  Dialog cur;
  auto finish = [&] {
    if (!cur.turns.empty()) {
      cur.id = dialogs.size();
      dialogs.push_back(std::move(cur));
    }
    cur = Dialog{};
  };
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    const auto line = lines[li];
    if (is_blank(line)) {
      finish();
      continue;
    }
    auto [number, payload] = split_number(line, lineno);
    const std::size_t expected_min = cur.turns.empty() ? 1 : cur.turns.back().index + 1;
    if (cur.turns.empty() ? number != 1 : number < expected_min)
      throw ParseError(lineno, "malformed line number " + std::to_string(number));
    Turn t;
    t.index = number;
    const auto tabs = std::count(payload.begin(), payload.end(), '\t');
    if (tabs > 1) throw ParseError(lineno, "more than one TAB in line");
    if (tabs == 1) {
      const auto tab = payload.find('\t');
      t.kind = Turn::Kind::kExchange;
      t.user = tokenize(payload.substr(0, tab));
      t.system = tokenize(payload.substr(tab + 1));
      if (t.user.empty() || t.system.empty())
        throw ParseError(lineno, "exchange with an empty side");
    } else {
      t.kind = Turn::Kind::kFact;
      t.system = tokenize(payload);
      if (t.system.empty()) throw ParseError(lineno, "empty fact line");
    }
    cur.turns.push_back(std::move(t));
  }
  finish();
  return dialogs;
}

std::string serialize_dialogs(const std::vector<Dialog>& dialogs) {
  std::string out;
  for (const auto& d : dialogs) {
    for (const auto& t : d.turns) {
      out += std::to_string(t.index);
      out.push_back(' ');
      if (t.is_exchange()) {
        out += join_tokens(t.user);
        out.push_back('\t');
      }
      out += join_tokens(t.system);
      out.push_back('\n');
    }
    out.push_back('\n');
  }
  return out;
}

CandidateSet::CandidateSet(std::vector<Tokens> candidates) : candidates_(std::move(candidates)) {
  texts_.reserve(candidates_.size());
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    texts_.push_back(join_tokens(candidates_[i]));
    if (!index_.emplace(texts_.back(), i).second)
      throw DataError("duplicate candidate: " + texts_.back());
  }
}

std::optional<std::size_t> CandidateSet::find(const Tokens& response) const {
  auto it = index_.find(join_tokens(response));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CandidateSet load_candidates(std::string_view text) {
  std::vector<Tokens> cands;
  std::map<std::string, std::size_t> first_line;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    if (is_blank(lines[li])) continue;
    auto [number, payload] = split_number(lines[li], lineno);
    (void)number;
    auto toks = tokenize(payload);
    if (toks.empty()) throw ParseError(lineno, "empty candidate");
    auto [it, inserted] = first_line.emplace(join_tokens(toks), lineno);
    if (!inserted)
      throw ParseError(lineno, "duplicate candidate (also on line " + std::to_string(it->second) +
                                   "): " + it->first);
    cands.push_back(std::move(toks));
  }
  if (cands.size() < 2) throw ParseError(lines.size(), "candidate file needs at least 2 responses");
  return CandidateSet(std::move(cands));
}

std::string serialize_candidates(const CandidateSet& candidates) {
  std::string out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out += "1 ";
    out += candidates.text(i);
    out.push_back('\n');
  }
  return out;
}

std::vector<RankingInstance> expand_instances(const Dialog& dialog, const CandidateSet& candidates) {
  std::vector<RankingInstance> out;
  std::vector<Tokens> history;
  std::size_t k = 0;
  for (const auto& t : dialog.turns) {
    if (!t.is_exchange()) {
      history.push_back(t.system);
      continue;
    }
    auto gold = candidates.find(t.system);
    if (!gold) throw DataError("response not in candidate set: " + join_tokens(t.system));
    RankingInstance inst;
    inst.history = history;
    inst.query = t.user;
    inst.gold = *gold;
    inst.turn_count = ++k;
    inst.dialog_id = dialog.id;
    out.push_back(std::move(inst));
    history.push_back(t.user);
    history.push_back(t.system);
  }
  return out;
}

std::vector<RankingInstance> expand_all(const std::vector<Dialog>& dialogs,
                                        const CandidateSet& candidates) {
  std::vector<RankingInstance> out;
  for (const auto& d : dialogs) {
    auto inst = expand_instances(d, candidates);
    out.insert(out.end(), std::make_move_iterator(inst.begin()), std::make_move_iterator(inst.end()));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw MissingArtifact("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw DataError("write failed: " + path);
}

}  // namespace ctxrr
