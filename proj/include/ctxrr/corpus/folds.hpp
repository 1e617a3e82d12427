#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ctxrr/corpus/dialog.hpp"

namespace ctxrr {

inline constexpr std::size_t kDefaultFolds = 5;

/// Instance index -> fold, with every instance of a dialog in the same fold.
struct FoldAssignment {
  std::vector<std::size_t> fold_of;
  std::size_t folds = 0;

  std::vector<std::size_t> members(std::size_t fold) const;
  std::vector<std::size_t> complement(std::size_t fold) const;
};

/// Shuffles dialog ids with a seeded RNG and deals them round-robin into
/// `folds` folds. Throws DataError when folds < 2 or there are fewer dialogs
/// than folds.
FoldAssignment split_folds(const std::vector<RankingInstance>& instances, std::size_t folds,
                           std::uint64_t seed);

}  // namespace ctxrr
