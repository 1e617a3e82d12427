#include "ctxrr/eval/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

EvalReport make_report(std::string model, const Accuracy& acc) {
  EvalReport r;
  r.model = std::move(model);
  r.total_acc = acc.total;
  r.api_acc = acc.api;
  r.instances = acc.instances;
  r.api_instances = acc.api_instances;
  return r;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["total_acc"] = r.total_acc;
  j["api_acc"] = r.api_acc ? nlohmann::ordered_json(*r.api_acc) : nlohmann::ordered_json(nullptr);
  auto& topk = j["topk"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.topk) topk[std::to_string(k)] = v;
  j["instances"] = r.instances;
  j["api_instances"] = r.api_instances;
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  return j.dump();
}

EvalReport report_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    EvalReport r;
    r.model = j.at("model").get<std::string>();
    r.total_acc = j.at("total_acc").get<double>();
    if (!j.at("api_acc").is_null()) r.api_acc = j.at("api_acc").get<double>();
    for (const auto& [k, v] : j.at("topk").items()) r.topk[std::stoul(k)] = v.get<double>();
    r.instances = j.at("instances").get<std::size_t>();
    r.api_instances = j.at("api_instances").get<std::size_t>();
    for (const auto& [k, v] : j.at("config").items()) r.config[k] = v.get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

std::string reports_to_jsonl(const std::vector<EvalReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += report_to_json(r) + '\n';
  return out;
}

std::vector<EvalReport> reports_from_jsonl(std::string_view text) {
  std::vector<EvalReport> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    if (nl > start) out.push_back(report_from_json(text.substr(start, nl - start)));
    start = nl + 1;
  }
  return out;
}

namespace {

std::string percent(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string format_table(const std::vector<EvalReport>& reports) {
  std::size_t name_w = 5;
  std::vector<std::size_t> ks;
  for (const auto& r : reports) {
    name_w = std::max(name_w, r.model.size());
    for (const auto& [k, _] : r.topk)
      if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  std::ostringstream os;
  os << pad("model", name_w, true) << "  " << pad("Total", 6, false) << "  " << pad("API", 6, false);
  for (std::size_t k : ks) os << "  " << pad("@" + std::to_string(k), 6, false);
  os << '\n';
  for (const auto& r : reports) {
    std::string line = pad(r.model, name_w, true) + "  " + pad(percent(r.total_acc), 6, false) + "  " +
                       pad(r.api_acc ? percent(*r.api_acc) : "-", 6, false);
    for (std::size_t k : ks) {
      const auto it = r.topk.find(k);
      line += "  " + pad(it == r.topk.end() ? "" : percent(it->second), 6, false);
    }
    line.erase(line.find_last_not_of(' ') + 1);
    os << line << '\n';
  }
  return os.str();
}

}  // namespace ctxrr
