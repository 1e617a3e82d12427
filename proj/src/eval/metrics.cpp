#include "ctxrr/eval/metrics.hpp"

#include <algorithm>

#include "ctxrr/corpus/actions.hpp"
#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

Accuracy accuracy(std::span<const std::size_t> predictions, std::span<const std::size_t> golds,
                  const CandidateSet& candidates) {
  if (predictions.size() != golds.size()) throw DataError("accuracy: predictions and golds differ in length");
  Accuracy a;
  a.instances = golds.size();
  std::size_t correct = 0, api_correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool ok = predictions[i] == golds[i];
    correct += ok;
    if (is_api_call(candidates[golds[i]])) {
      ++a.api_instances;
      api_correct += ok;
    }
  }
  if (a.instances) a.total = static_cast<double>(correct) / static_cast<double>(a.instances);
  if (a.api_instances) a.api = static_cast<double>(api_correct) / static_cast<double>(a.api_instances);
  return a;
}

double topk_accuracy(const std::vector<Vector>& rankings, std::span<const std::size_t> golds, std::size_t k) {
  if (k == 0) throw DataError("top-K accuracy needs K >= 1");
  if (rankings.size() != golds.size()) throw DataError("top-K accuracy: rankings and golds differ in length");
  if (golds.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const Vector& s = rankings[i];
    const std::size_t g = golds[i];
    std::size_t ahead = 0;
    for (std::size_t j = 0; j < s.size(); ++j) ahead += s[j] > s[g] || (s[j] == s[g] && j < g);
    hit += ahead < k;
  }
  return static_cast<double>(hit) / static_cast<double>(golds.size());
}

const std::vector<std::string>& stop_words() {
  static const std::vector<std::string> words{
      "a",  "an", "the", "and", "or",  "but", "of", "to",   "in",   "on", "at", "for", "with",
      "from", "by", "as", "is", "are", "was", "be", "it", "this", "that", "i",  "you",
  };
  return words;
}

Tokens remove_stop_words(const Tokens& tokens) {
  const auto& stop = stop_words();
  Tokens out;
  for (const auto& t : tokens)
    if (std::find(stop.begin(), stop.end(), t) == stop.end()) out.push_back(t);
  return out;
}

std::size_t edit_distance(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double wer(const Tokens& reference, const Tokens& hypothesis, bool filtered) {
  const Tokens ref = filtered ? remove_stop_words(reference) : reference;
  const Tokens hyp = filtered ? remove_stop_words(hypothesis) : hypothesis;
  if (ref.empty()) throw DataError("WER: empty reference");
  return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(ref.size());
}

}  // namespace ctxrr
