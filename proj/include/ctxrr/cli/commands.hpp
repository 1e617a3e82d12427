#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctxrr/cli/config.hpp"
#include "ctxrr/eval/report.hpp"
#include "ctxrr/rerank/rule.hpp"

namespace ctxrr {

/// Where each trained artifact lives under paths.model_dir.
struct ArtifactPaths {
  std::string bds;
  std::string matcher;
  std::string meta;
  std::string oof;
  std::string audit;     // fold audit of the last stacking run, JSON
  std::string report;    // per test set: eval_mmn.jsonl, eval_mmn.disfluency.jsonl
  std::string ablation;
};
ArtifactPaths artifact_paths(const ExperimentConfig& cfg);

/// Train/dev/test dialog files and the candidates file, plus one parallel
/// noisy test file per configured profile.
void cmd_generate(const ExperimentConfig& cfg, std::ostream& out);

/// stage: bds, match or rerank. rerank needs the bds model; stacking trains
/// its per-fold matchers itself, rule trains one full-data matcher.
void cmd_train(const ExperimentConfig& cfg, const std::string& stage, std::ostream& out);

/// Prints the accuracy table and writes the JSON-lines report; with
/// `ablation` also the four-way feature ablation over the stacking cache.
std::vector<EvalReport> cmd_eval(const ExperimentConfig& cfg, bool ablation, std::ostream& out);

/// One scorer's ordering: candidate ids by descending score, ties to the lower id.
struct ScorerView {
  std::string name;
  Vector scores;
  std::vector<std::size_t> order;
};

struct RankResult {
  std::vector<ScorerView> scorers;  // BDS, MAT, then the configured re-ranker
  RerankDecision decision;
};

/// Ranks the candidates for `query` after the history in `context_path`
/// (bAbI dialog format; empty path means no history) and prints the top `k`
/// of each scorer.
RankResult cmd_rank(const ExperimentConfig& cfg, const std::string& context_path, const std::string& query,
                    std::size_t k, std::ostream& out);

/// Line-oriented session: `:reset` clears the history, `:quit` or end of
/// input leaves.
void cmd_chat(const ExperimentConfig& cfg, bool debug, std::istream& in, std::ostream& out);

/// Parses arguments and dispatches. Returns 0 ok, 1 usage, 2 data error,
/// 3 missing artifact.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace ctxrr
