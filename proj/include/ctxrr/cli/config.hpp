#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctxrr/bds/memnn.hpp"
#include "ctxrr/match/matcher.hpp"
#include "ctxrr/rerank/meta.hpp"
#include "ctxrr/rerank/rule.hpp"

namespace ctxrr {

enum class RerankKind { kRule, kStacking };
std::string_view rerank_name(RerankKind k);
RerankKind parse_rerank_kind(std::string_view name);

struct PathSettings {
  std::string train = "data/train.txt";
  std::string dev = "data/dev.txt";
  std::string test = "data/test.txt";
  std::string candidates = "data/candidates.txt";
  std::string model_dir = "models";
  friend bool operator==(const PathSettings&, const PathSettings&) = default;
};

struct GenerateSettings {
  std::size_t train_dialogs = 500;
  std::size_t dev_dialogs = 100;
  std::size_t test_dialogs = 100;
  std::size_t slots = 3;
  double state_prob = 0.0;
  /// Space-separated noisy test sets to write next to the clean one:
  /// "disfluency" and/or "asr". "none" writes only the clean files.
  std::string profiles = "none";
  double disfluency_rate = 1.0;
  double substitution_rate = 0.2;
  std::string lexicon;  // empty: built-in confusion lexicon
  friend bool operator==(const GenerateSettings&, const GenerateSettings&) = default;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  PathSettings paths;
  GenerateSettings generate;
  BdsConfig bds;
  MatcherKind matcher = MatcherKind::kMmn;
  MatchConfig match;
  RerankKind rerank = RerankKind::kStacking;
  std::size_t folds = 5;
  bool vote = true;
  RuleConfig rule;
  FeatureConfig features;
  MetaConfig meta;
  std::size_t topk = 0;
  std::string test_set = "none";  // which test variant eval/rank read: none, disfluency, asr
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// `key = value` lines under `[section]` headers; `#` starts a comment, so
/// values cannot contain it.
/// Keys missing from the text keep their defaults. Throws ParseError on
/// unknown sections or keys and malformed values, DataError on values out of range.
ExperimentConfig parse_config(std::string_view text);
/// Every key, so parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

/// Throws DataError naming the first out-of-range setting.
void validate_config(const ExperimentConfig& cfg);

/// Path of a noisy test variant: data/test.txt -> data/test.asr.txt.
std::string test_variant_path(const std::string& test, std::string_view profile);
std::vector<std::string> noise_profiles(const GenerateSettings& g);

}  // namespace ctxrr
