#include "ctxrr/corpus/folds.hpp"

#include <map>

#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/random.hpp"

namespace ctxrr {

std::vector<std::size_t> FoldAssignment::members(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::complement(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

FoldAssignment split_folds(const std::vector<RankingInstance>& instances, std::size_t folds,
                           std::uint64_t seed) {
  if (folds < 2) throw DataError("fold count must be at least 2");
  std::vector<std::size_t> dialogs;
  std::map<std::size_t, std::size_t> seen;
  for (const auto& inst : instances)
    if (seen.emplace(inst.dialog_id, dialogs.size()).second) dialogs.push_back(inst.dialog_id);
  if (dialogs.size() < folds)
    throw DataError("cannot split " + std::to_string(dialogs.size()) + " dialogs into " +
                    std::to_string(folds) + " folds");
  Rng rng(seed);
  rng.shuffle(dialogs);
  std::map<std::size_t, std::size_t> fold_of_dialog;
  for (std::size_t i = 0; i < dialogs.size(); ++i) fold_of_dialog[dialogs[i]] = i % folds;
  FoldAssignment fa;
  fa.folds = folds;
  fa.fold_of.reserve(instances.size());
  for (const auto& inst : instances) fa.fold_of.push_back(fold_of_dialog[inst.dialog_id]);
  return fa;
}

}  // namespace ctxrr
