#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxrr/corpus/dialog.hpp"
#include "ctxrr/numeric/tensor.hpp"

namespace ctxrr {

struct Accuracy {
  double total = 0.0;
  std::optional<double> api;  // absent when no gold is an api_call
  std::size_t instances = 0;
  std::size_t api_instances = 0;
};

/// Exact-id accuracy over all turns, and over turns whose gold is an api_call.
Accuracy accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> golds,
                  const CandidateSet& candidates);

/// Share of turns whose gold is among the K best scores, ranked by (-score, id).
double topk_accuracy(const std::vector<Vector>& rankings, std::span<const std::size_t> golds, std::size_t k);

/// Fixed English function-word list used by filtered WER.
const std::vector<std::string>& stop_words();
Tokens remove_stop_words(const Tokens& tokens);

std::size_t edit_distance(const Tokens& a, const Tokens& b);

/// Word-level Levenshtein distance over the reference length. With `filtered`
/// both sides lose their stop words first. Throws DataError on an empty
/// (filtered) reference.
double wer(const Tokens& reference, const Tokens& hypothesis, bool filtered = false);

}  // namespace ctxrr
