#include "ctxrr/corpus/synthetic.hpp"

#include <algorithm>

#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/random.hpp"

namespace ctxrr {

namespace {

constexpr std::string_view kGreetingResponse = "hello what can i help you with today";
constexpr std::string_view kSearchingResponse = "ok let me look into some options for you";

const std::vector<std::string_view> kGreetings = {"hi", "hello", "good morning", "hey there"};
const std::vector<std::string_view> kRequests = {
    "i'd like to book a table", "can you make a restaurant reservation", "may i have a table",
    "i want to book a restaurant"};

struct SlotTemplates {
  std::string ask;
  std::string request;               // "$" is replaced by the value
  std::vector<std::string> answers;  // likewise
};

SlotTemplates templates_for(const std::string& name) {
  if (name == "cuisine")
    return {"any preference on a type of cuisine", "with $ food", {"$", "i love $ food", "$ food please"}};
  if (name == "location")
    return {"where should it be", "in $", {"$", "in $", "$ please"}};
  if (name == "price")
    return {"which price range are you looking for", "in a $ price range",
            {"$", "in a $ price range", "a $ one please"}};
  if (name == "people")
    return {"how many people would be in your party", "for $ people",
            {"$", "for $ people", "we will be $"}};
  return {"what " + name + " would you like", "with " + name + " $", {"$", name + " $ please"}};
}

std::string fill(const std::string& tpl, const std::string& value) {
  std::string out;
  for (char c : tpl) {
    if (c == '$')
      out += value;
    else
      out.push_back(c);
  }
  return out;
}

Tokens api_call_tokens(const std::vector<std::string>& values) {
  Tokens t{std::string(kApiCallToken)};
  t.insert(t.end(), values.begin(), values.end());
  return t;
}

}  // namespace

SlotSchema restaurant_schema(std::size_t slots) {
  SlotSchema s;
  s.names = {"cuisine", "location", "price"};
  s.values = {{"french", "italian", "indian", "spanish", "british"},
              {"paris", "london", "rome", "madrid", "bombay"},
              {"cheap", "moderate", "expensive"}};
  if (slots == 4) {
    s.names.insert(s.names.begin() + 2, "people");
    s.values.insert(s.values.begin() + 2, {"two", "four", "six", "eight"});
  } else if (slots != 3) {
    throw DataError("restaurant schema supports 3 or 4 slots");
  }
  return s;
}

CandidateSet synthetic_candidates(const SlotSchema& schema) {
  std::vector<Tokens> cands;
  cands.push_back(tokenize(kGreetingResponse));
  cands.push_back(tokenize(kSearchingResponse));
  for (const auto& name : schema.names) cands.push_back(tokenize(templates_for(name).ask));
  std::vector<std::size_t> pos(schema.arity(), 0);
  if (schema.arity() > 0) {
    while (true) {
      std::vector<std::string> vals;
      for (std::size_t s = 0; s < schema.arity(); ++s) vals.push_back(schema.values[s][pos[s]]);
      cands.push_back(api_call_tokens(vals));
      std::size_t s = schema.arity();
      while (s > 0) {
        --s;
        if (++pos[s] < schema.values[s].size()) break;
        pos[s] = 0;
        if (s == 0) goto done;
      }
    }
  }
done:
  return CandidateSet(std::move(cands));
}

SyntheticCorpus generate_synthetic_corpus(const GeneratorConfig& cfg) {
  if (cfg.schema.arity() == 0) throw DataError("generator needs a non-empty slot schema");
  for (const auto& v : cfg.schema.values)
    if (v.empty()) throw DataError("generator slot without values");
  SyntheticCorpus corpus;
  corpus.candidates = synthetic_candidates(cfg.schema);
  Rng rng(cfg.seed);
  const std::size_t arity = cfg.schema.arity();
  for (std::size_t d = 0; d < cfg.n_dialogs; ++d) {
    Dialog dialog;
    dialog.id = d;
    std::size_t line = 1;
    auto exchange = [&](const std::string& user, const Tokens& system) {
      Turn t;
      t.kind = Turn::Kind::kExchange;
      t.index = line++;
      t.user = tokenize(user);
      t.system = system;
      dialog.turns.push_back(std::move(t));
    };

    std::vector<std::string> values(arity);
    std::vector<bool> stated(arity);
    for (std::size_t s = 0; s < arity; ++s) {
      values[s] = cfg.schema.values[s][rng.below(cfg.schema.values[s].size())];
      stated[s] = rng.bernoulli(cfg.state_prob);
    }

    exchange(std::string(kGreetings[rng.below(kGreetings.size())]), tokenize(kGreetingResponse));

    std::string request(kRequests[rng.below(kRequests.size())]);
    for (std::size_t s = 0; s < arity; ++s)
      if (stated[s]) request += " " + fill(templates_for(cfg.schema.names[s]).request, values[s]);

    std::string user = request;
    for (std::size_t s = 0; s < arity; ++s) {
      if (stated[s]) continue;
      const auto tpl = templates_for(cfg.schema.names[s]);
      exchange(user, tokenize(tpl.ask));
      user = fill(tpl.answers[rng.below(tpl.answers.size())], values[s]);
    }
    exchange(user, api_call_tokens(values));
    corpus.dialogs.push_back(std::move(dialog));
  }
  return corpus;
}

ConfusionLexicon parse_confusion_lexicon(std::string_view text) {
  ConfusionLexicon lex;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start < text.size()) {
    ++lineno;
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
      throw ParseError(lineno, "confusion lexicon line must be token<TAB>alternative");
    std::string tok(line.substr(0, tab));
    std::string alt(line.substr(tab + 1));
    if (tok.empty() || alt.empty()) throw ParseError(lineno, "empty lexicon entry");
    lex[tok].push_back(alt);
  }
  return lex;
}

std::string_view default_confusion_lexicon_text() {
  static constexpr std::string_view kText =
#include "default_lexicon.inc"
      ;
  return kText;
}

const ConfusionLexicon& default_confusion_lexicon() {
  static const ConfusionLexicon lex = parse_confusion_lexicon(default_confusion_lexicon_text());
  return lex;
}

namespace {

enum class Disfluency { kHesitation, kRestart, kCorrection };

Tokens apply_disfluency(const Tokens& utt, const NoiseConfig& cfg, Rng& rng) {
  // Slot-value positions available for a self-correction.
  std::vector<std::pair<std::size_t, std::size_t>> slot_hits;  // (token pos, slot)
  for (std::size_t i = 0; i < utt.size(); ++i)
    for (std::size_t s = 0; s < cfg.schema.arity(); ++s)
      if (cfg.schema.values[s].size() > 1 && cfg.schema.value_index(s, utt[i]))
        slot_hits.emplace_back(i, s);

  const double wh = cfg.hesitations.empty() ? 0.0 : cfg.weight_hesitation;
  const double wr = cfg.weight_restart;
  const double wc = slot_hits.empty() ? 0.0 : cfg.weight_correction;
  const double total = wh + wr + wc;
  if (total <= 0.0) return utt;
  const double x = rng.uniform() * total;
  const Disfluency kind = x < wh ? Disfluency::kHesitation
                          : x < wh + wr ? Disfluency::kRestart
                                        : Disfluency::kCorrection;
  Tokens out;
  switch (kind) {
    case Disfluency::kHesitation: {
      const std::size_t at = rng.below(utt.size() + 1);
      out = utt;
      out.insert(out.begin() + static_cast<std::ptrdiff_t>(at),
                 cfg.hesitations[rng.below(cfg.hesitations.size())]);
      break;
    }
    case Disfluency::kRestart: {
      const std::size_t prefix = 1 + rng.below(utt.size());
      out.assign(utt.begin(), utt.begin() + static_cast<std::ptrdiff_t>(prefix));
      out.insert(out.end(), utt.begin(), utt.end());
      break;
    }
    case Disfluency::kCorrection: {
      const auto [pos, slot] = slot_hits[rng.below(slot_hits.size())];
      const auto& vals = cfg.schema.values[slot];
      const std::size_t correct = *cfg.schema.value_index(slot, utt[pos]);
      std::size_t wrong = rng.below(vals.size() - 1);
      if (wrong >= correct) ++wrong;
      out.assign(utt.begin(), utt.begin() + static_cast<std::ptrdiff_t>(pos));
      out.push_back(vals[wrong]);
      out.emplace_back("no");
      out.insert(out.end(), utt.begin() + static_cast<std::ptrdiff_t>(pos), utt.end());
      break;
    }
  }
  return out;
}

}  // namespace

Dialog inject_noise(const Dialog& dialog, const NoiseConfig& cfg, std::uint64_t seed,
                    NoiseStats* stats) {
  auto in_unit = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!in_unit(cfg.disfluency_rate) || !in_unit(cfg.substitution_rate))
    throw DataError("noise rates must lie in [0, 1]");
  if (cfg.substitution_rate > 0.0 && cfg.lexicon.empty())
    throw DataError("substitution noise requires a non-empty confusion lexicon");
  Rng rng(seed);
  Dialog out = dialog;
  for (auto& turn : out.turns) {
    if (!turn.is_exchange()) continue;
    if (stats) ++stats->utterances_seen;
    if (cfg.disfluency_rate > 0.0 && rng.bernoulli(cfg.disfluency_rate)) {
      turn.user = apply_disfluency(turn.user, cfg, rng);
      if (stats) ++stats->disfluencies;
    }
    if (cfg.substitution_rate > 0.0) {
      for (auto& tok : turn.user) {
        if (stats) ++stats->tokens_seen;
        if (!rng.bernoulli(cfg.substitution_rate)) continue;
        auto it = cfg.lexicon.find(tok);
        if (it == cfg.lexicon.end()) continue;
        const auto& alt = it->second[rng.below(it->second.size())];
        if (stats && alt != tok) ++stats->tokens_substituted;
        tok = alt;
      }
    }
  }
  return out;
}

std::vector<Dialog> inject_noise(const std::vector<Dialog>& dialogs, const NoiseConfig& cfg,
                                 std::uint64_t seed, NoiseStats* stats) {
  std::vector<Dialog> out;
  out.reserve(dialogs.size());
  Rng seeds(seed);
  for (const auto& d : dialogs) out.push_back(inject_noise(d, cfg, seeds.next(), stats));
  return out;
}

}  // namespace ctxrr
