#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ctxrr/corpus/actions.hpp"
#include "ctxrr/corpus/dialog.hpp"

namespace ctxrr {

/// Restaurant-booking slot schemas understood by the generator's templates.
/// Three slots: cuisine, location, price. Four slots adds party size.
SlotSchema restaurant_schema(std::size_t slots);

struct GeneratorConfig {
  std::size_t n_dialogs = 0;
  SlotSchema schema;
  std::uint64_t seed = 1;
  /// Probability that the opening request already states a given slot.
  double state_prob = 0.0;
};

struct SyntheticCorpus {
  std::vector<Dialog> dialogs;
  CandidateSet candidates;
};

/// Greeting, two fixed responses, one ask per slot, then every api_call
/// combination with the first slot varying slowest.
CandidateSet synthetic_candidates(const SlotSchema& schema);

/// Each dialog: a greeting exchange; the request and every answer draw the
/// next ask for an unstated slot; the final exchange's response is the
/// api_call over all slots.
SyntheticCorpus generate_synthetic_corpus(const GeneratorConfig& cfg);

using ConfusionLexicon = std::map<std::string, std::vector<std::string>>;

/// One `token<TAB>alternative` pair per non-blank line.
ConfusionLexicon parse_confusion_lexicon(std::string_view text);
/// Shipped lexicon covering the generator vocabulary (data/confusions.tsv).
std::string_view default_confusion_lexicon_text();
const ConfusionLexicon& default_confusion_lexicon();

struct NoiseConfig {
  double disfluency_rate = 0.0;    // per user utterance
  double substitution_rate = 0.0;  // per user token
  ConfusionLexicon lexicon;
  Tokens hesitations{"uhm", "uh", "er"};
  /// Slot values that self-corrections replace with a wrong value first.
  SlotSchema schema;
  /// Relative weights of hesitation, restart, self-correction.
  double weight_hesitation = 1.0;
  double weight_restart = 1.0;
  double weight_correction = 1.0;
};

struct NoiseStats {
  std::size_t tokens_seen = 0;
  std::size_t tokens_substituted = 0;
  std::size_t utterances_seen = 0;
  std::size_t disfluencies = 0;
};

/// Rewrites user utterances only. Disfluencies: hesitation insertion, restart
/// (a prefix is re-emitted), self-correction (`<wrong> no <value>`). Then each
/// user token is swapped for a lexicon neighbor with the substitution rate.
/// Throws DataError on rates outside [0,1] or an empty lexicon with a
/// positive substitution rate.
Dialog inject_noise(const Dialog& dialog, const NoiseConfig& cfg, std::uint64_t seed,
                    NoiseStats* stats = nullptr);
std::vector<Dialog> inject_noise(const std::vector<Dialog>& dialogs, const NoiseConfig& cfg,
                                 std::uint64_t seed, NoiseStats* stats = nullptr);

}  // namespace ctxrr
