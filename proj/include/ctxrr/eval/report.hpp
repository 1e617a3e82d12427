#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctxrr/eval/metrics.hpp"

namespace ctxrr {

struct EvalReport {
  std::string model;
  double total_acc = 0.0;
  std::optional<double> api_acc;
  std::map<std::size_t, double> topk;  // K -> acc@K
  std::size_t instances = 0;
  std::size_t api_instances = 0;
  std::map<std::string, std::string> config;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport make_report(std::string model, const Accuracy& acc);

/// One JSON object per line.
std::string report_to_json(const EvalReport& r);
EvalReport report_from_json(std::string_view line);
std::string reports_to_jsonl(const std::vector<EvalReport>& reports);
std::vector<EvalReport> reports_from_jsonl(std::string_view text);

/// Model rows by Total / API columns in percent; top-K columns when present.
std::string format_table(const std::vector<EvalReport>& reports);

}  // namespace ctxrr
