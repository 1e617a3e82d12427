#include "ctxrr/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <sstream>

#include "ctxrr/corpus/dialog.hpp"
#include "ctxrr/numeric/error.hpp"

namespace ctxrr {

std::string_view rerank_name(RerankKind k) { return k == RerankKind::kRule ? "rule" : "stacking"; }

RerankKind parse_rerank_kind(std::string_view name) {
  if (name == "rule") return RerankKind::kRule;
  if (name == "stacking") return RerankKind::kStacking;
  throw DataError("unknown rerank kind '" + std::string(name) + "' (rule, stacking)");
}

namespace {

static_assert(std::is_same_v<std::uint64_t, std::size_t>, "seed shares the size_t converters");

std::string to_text(std::size_t v) { return std::to_string(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(const std::string& v) { return v; }
std::string to_text(MatcherKind k) { return std::string(matcher_name(k)); }
std::string to_text(RerankKind k) { return std::string(rerank_name(k)); }
std::string to_text(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  return std::string(buf, r.ptr);
}

template <class T>
bool from_chars_all(const std::string& s, T& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

void from_text(const std::string& s, std::size_t& v) {
  if (!from_chars_all(s, v)) throw DataError("expected a non-negative integer, got '" + s + "'");
}
void from_text(const std::string& s, double& v) {
  if (!from_chars_all(s, v)) throw DataError("expected a number, got '" + s + "'");
}
void from_text(const std::string& s, bool& v) {
  if (s == "true" || s == "1") v = true;
  else if (s == "false" || s == "0") v = false;
  else throw DataError("expected true or false, got '" + s + "'");
}
void from_text(const std::string& s, std::string& v) { v = s; }
void from_text(const std::string& s, MatcherKind& v) { v = parse_matcher_kind(s); }
void from_text(const std::string& s, RerankKind& v) { v = parse_rerank_kind(s); }

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class T>
Field field(std::string section, std::string key, T ExperimentConfig::*m) {
  return {std::move(section), std::move(key), [m](const ExperimentConfig& c) { return to_text(c.*m); },
          [m](ExperimentConfig& c, const std::string& s) { from_text(s, c.*m); }};
}

template <class S, class T>
Field field(std::string section, std::string key, S ExperimentConfig::*outer, T S::*inner) {
  return {std::move(section), std::move(key),
          [outer, inner](const ExperimentConfig& c) { return to_text(c.*outer.*inner); },
          [outer, inner](ExperimentConfig& c, const std::string& s) { from_text(s, c.*outer.*inner); }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> f = {
      field("", "seed", &C::seed),
      field("paths", "train", &C::paths, &PathSettings::train),
      field("paths", "dev", &C::paths, &PathSettings::dev),
      field("paths", "test", &C::paths, &PathSettings::test),
      field("paths", "candidates", &C::paths, &PathSettings::candidates),
      field("paths", "model_dir", &C::paths, &PathSettings::model_dir),
      field("generate", "train_dialogs", &C::generate, &GenerateSettings::train_dialogs),
      field("generate", "dev_dialogs", &C::generate, &GenerateSettings::dev_dialogs),
      field("generate", "test_dialogs", &C::generate, &GenerateSettings::test_dialogs),
      field("generate", "slots", &C::generate, &GenerateSettings::slots),
      field("generate", "state_prob", &C::generate, &GenerateSettings::state_prob),
      field("generate", "profiles", &C::generate, &GenerateSettings::profiles),
      field("generate", "disfluency_rate", &C::generate, &GenerateSettings::disfluency_rate),
      field("generate", "substitution_rate", &C::generate, &GenerateSettings::substitution_rate),
      field("generate", "lexicon", &C::generate, &GenerateSettings::lexicon),
      field("bds", "dim", &C::bds, &BdsConfig::dim),
      field("bds", "hops", &C::bds, &BdsConfig::hops),
      field("bds", "epochs", &C::bds, &BdsConfig::epochs),
      field("bds", "batch", &C::bds, &BdsConfig::batch),
      field("bds", "lr", &C::bds, &BdsConfig::lr),
      field("bds", "temporal", &C::bds, &BdsConfig::temporal),
      field("bds", "max_memory", &C::bds, &BdsConfig::max_memory),
      field("bds", "clip_norm", &C::bds, &BdsConfig::clip_norm),
      field("bds", "init_scale", &C::bds, &BdsConfig::init_scale),
      field("match", "kind", &C::matcher),
      field("match", "dim", &C::match, &MatchConfig::dim),
      field("match", "hops", &C::match, &MatchConfig::hops),
      field("match", "hidden", &C::match, &MatchConfig::hidden),
      field("match", "margin", &C::match, &MatchConfig::margin),
      field("match", "epochs", &C::match, &MatchConfig::epochs),
      field("match", "batch", &C::match, &MatchConfig::batch),
      field("match", "lr", &C::match, &MatchConfig::lr),
      field("match", "neg_tries", &C::match, &MatchConfig::neg_tries),
      field("match", "max_len", &C::match, &MatchConfig::max_len),
      field("match", "temporal", &C::match, &MatchConfig::temporal),
      field("match", "max_memory", &C::match, &MatchConfig::max_memory),
      field("match", "clip_norm", &C::match, &MatchConfig::clip_norm),
      field("match", "init_scale", &C::match, &MatchConfig::init_scale),
      field("rerank", "kind", &C::rerank),
      field("rerank", "folds", &C::folds),
      field("rerank", "vote", &C::vote),
      field("rerank", "top_n", &C::rule, &RuleConfig::top_n),
      field("rerank", "mask_width", &C::features, &FeatureConfig::mask_width),
      field("rerank", "max_turns", &C::features, &FeatureConfig::max_turns),
      field("rerank", "use_ctx", &C::features, &FeatureConfig::use_ctx),
      field("rerank", "use_ans", &C::features, &FeatureConfig::use_ans),
      field("rerank", "hidden", &C::meta, &MetaConfig::hidden),
      field("rerank", "epochs", &C::meta, &MetaConfig::epochs),
      field("rerank", "batch", &C::meta, &MetaConfig::batch),
      field("rerank", "lr", &C::meta, &MetaConfig::lr),
      field("rerank", "init_scale", &C::meta, &MetaConfig::init_scale),
      field("rerank", "clip_norm", &C::meta, &MetaConfig::clip_norm),
      field("eval", "topk", &C::topk),
      field("eval", "test_set", &C::test_set),
  };
  return f;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

void positive(std::size_t v, const char* name) {
  if (v == 0) throw DataError(std::string(name) + " must be positive");
}
void positive(double v, const char* name) {
  if (!(v > 0.0)) throw DataError(std::string(name) + " must be positive");
}
void unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw DataError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

std::vector<std::string> noise_profiles(const GenerateSettings& g) {
  std::vector<std::string> out;
  for (const auto& p : tokenize(g.profiles)) {
    if (p == "none") continue;
    if (p != "disfluency" && p != "asr") throw DataError("unknown noise profile '" + p + "' (disfluency, asr)");
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

void validate_config(const ExperimentConfig& c) {
  if (c.paths.model_dir.empty()) throw DataError("paths.model_dir must not be empty");
  for (const auto* p : {&c.paths.train, &c.paths.dev, &c.paths.test, &c.paths.candidates})
    if (p->empty()) throw DataError("dialog and candidate paths must not be empty");
  if (c.generate.slots < 3 || c.generate.slots > 4) throw DataError("generate.slots must be 3 or 4");
  unit_interval(c.generate.state_prob, "generate.state_prob");
  unit_interval(c.generate.disfluency_rate, "generate.disfluency_rate");
  unit_interval(c.generate.substitution_rate, "generate.substitution_rate");
  noise_profiles(c.generate);
  positive(c.bds.dim, "bds.dim");
  positive(c.bds.hops, "bds.hops");
  positive(c.bds.epochs, "bds.epochs");
  positive(c.bds.batch, "bds.batch");
  positive(c.bds.lr, "bds.lr");
  positive(c.bds.max_memory, "bds.max_memory");
  positive(c.bds.clip_norm, "bds.clip_norm");
  positive(c.bds.init_scale, "bds.init_scale");
  positive(c.match.dim, "match.dim");
  positive(c.match.hops, "match.hops");
  positive(c.match.hidden, "match.hidden");
  positive(c.match.margin, "match.margin");
  positive(c.match.epochs, "match.epochs");
  positive(c.match.batch, "match.batch");
  positive(c.match.lr, "match.lr");
  positive(c.match.neg_tries, "match.neg_tries");
  positive(c.match.max_len, "match.max_len");
  positive(c.match.max_memory, "match.max_memory");
  positive(c.match.clip_norm, "match.clip_norm");
  positive(c.match.init_scale, "match.init_scale");
  if (c.folds < 2) throw DataError("rerank.folds must be at least 2");
  positive(c.rule.top_n, "rerank.top_n");
  positive(c.features.mask_width, "rerank.mask_width");
  positive(c.features.max_turns, "rerank.max_turns");
  positive(c.meta.hidden, "rerank.hidden");
  positive(c.meta.epochs, "rerank.epochs");
  positive(c.meta.batch, "rerank.batch");
  positive(c.meta.lr, "rerank.lr");
  positive(c.meta.init_scale, "rerank.init_scale");
  positive(c.meta.clip_norm, "rerank.clip_norm");
  if (c.test_set != "none" && c.test_set != "disfluency" && c.test_set != "asr")
    throw DataError("eval.test_set must be none, disfluency or asr");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::string section;
  std::size_t lineno = 0;
  std::istringstream is{std::string(text)};
  std::string raw;
  while (std::getline(is, raw)) {
    ++lineno;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(lineno, "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      bool known = false;
      for (const auto& f : fields()) known |= f.section == section;
      if (!known) throw ParseError(lineno, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const Field* hit = nullptr;
    for (const auto& f : fields())
      if (f.section == section && f.key == key) hit = &f;
    if (!hit) throw ParseError(lineno, "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
    try {
      hit->set(c, value);
    } catch (const DataError& e) {
      throw ParseError(lineno, key + ": " + e.what());
    }
  }
  validate_config(c);
  return c;
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      section = f.section;
      os << "\n[" << section << "]\n";
    }
    os << f.key << " = " << f.get(c) << '\n';
  }
  return os.str();
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string test_variant_path(const std::string& test, std::string_view profile) {
  if (profile.empty() || profile == "none") return test;
  const std::filesystem::path p(test);
  auto out = p.parent_path() / (p.stem().string() + "." + std::string(profile) + p.extension().string());
  return out.string();
}

}  // namespace ctxrr
