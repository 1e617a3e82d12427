#include "ctxrr/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ctxrr/corpus/synthetic.hpp"
#include "ctxrr/eval/pipeline.hpp"
#include "ctxrr/numeric/error.hpp"
#include "ctxrr/numeric/ops.hpp"

namespace ctxrr {

ArtifactPaths artifact_paths(const ExperimentConfig& cfg) {
  const std::filesystem::path dir(cfg.paths.model_dir);
  const std::string m(matcher_name(cfg.matcher));
  ArtifactPaths p;
  p.bds = (dir / "bds.model").string();
  p.matcher = (dir / ("match_" + m + ".model")).string();
  p.meta = (dir / ("meta_" + m + ".model")).string();
  p.oof = (dir / ("oof_" + m + ".model")).string();
  p.audit = (dir / ("folds_" + m + ".json")).string();
  const std::string set = cfg.test_set == "none" ? "" : "." + cfg.test_set;
  p.report = (dir / ("eval_" + m + set + ".jsonl")).string();
  p.ablation = (dir / ("ablation_" + m + set + ".jsonl")).string();
  return p;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<RankingInstance> load_instances(const std::string& path, const CandidateSet& candidates) {
  return expand_all(parse_dialog_file(read_text_file(path)), candidates);
}

/// Response text of each candidate line exactly as written in the file.
std::vector<std::string> raw_candidate_texts(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto sp = line.find(' ');
    out.push_back(sp == std::string::npos ? std::string() : line.substr(sp + 1));
  }
  return out;
}

ModelContainer require(const std::string& path, std::string_view what, std::string_view stage,
                       std::string_view kind = {}) {
  if (!std::filesystem::exists(path))
    throw MissingArtifact("missing " + std::string(what) + " " + path + " (run `train " + std::string(stage) +
                          "` first)");
  return load_container(path, kind);
}

/// Everything ranking needs, loaded once.
struct Models {
  CandidateSet candidates;
  std::vector<std::string> texts;
  MemNN bds;
  std::unique_ptr<Matcher> matcher;
  std::optional<MetaModel> meta;
  std::optional<ActionSpace> space;
};

Models load_models(const ExperimentConfig& cfg) {
  const auto paths = artifact_paths(cfg);
  const auto cand_text = read_text_file(cfg.paths.candidates);
  Models m{load_candidates(cand_text), raw_candidate_texts(cand_text),
           MemNN::from_container(require(paths.bds, "bds model", "bds", kBdsKind)),
           load_matcher(require(paths.matcher, "matcher", "match` or `train rerank", matcher_tag(cfg.matcher))),
           std::nullopt, std::nullopt};
  if (m.bds.n_candidates() != m.candidates.size())
    throw DataError("bds model scores " + std::to_string(m.bds.n_candidates()) + " candidates but " +
                    cfg.paths.candidates + " has " + std::to_string(m.candidates.size()));
  if (cfg.rerank == RerankKind::kStacking) {
    m.meta = MetaModel::from_container(require(paths.meta, "stacking model", "rerank", kMetaKind));
    m.space.emplace(m.candidates, m.meta->schema());
  }
  return m;
}

RankResult rank_instance(const Models& m, const ExperimentConfig& cfg, const RankingInstance& inst) {
  RankResult r;
  const Vector y_bds = bds_predict(inst, m.bds);
  const MatchOutput match = m.matcher->score(inst);
  if (cfg.rerank == RerankKind::kRule)
    r.decision = rerank_rule(y_bds, match, cfg.rule, cfg.vote);
  else
    r.decision = rerank_stacking(y_bds, match, inst.turn_count, *m.meta, *m.space, m.candidates, cfg.vote);
  const std::string mat(matcher_name(cfg.matcher));
  auto view = [&](std::string name, const Vector& s) {
    r.scorers.push_back({std::move(name), s, top_k_indices(s, s.size())});
  };
  view("BDS", y_bds);
  view(mat + " MAT", match.y_mat);
  view(cfg.rerank == RerankKind::kRule ? mat + " RULE" : mat + " STACKING", r.decision.scores);
  return r;
}

void print_views(const RankResult& r, const Models& m, std::size_t k, std::ostream& out) {
  for (const auto& v : r.scorers) {
    out << v.name << '\n';
    for (std::size_t i = 0; i < std::min(k, v.order.size()); ++i) {
      const std::size_t id = v.order[i];
      out << "  " << i + 1 << "  " << fixed(v.scores[id], 4) << "  " << m.texts[id] << '\n';
    }
  }
}

/// Instance for the next exchange after `context`: the context's lines become
/// history exactly as expand_instances would build them.
RankingInstance next_instance(const Dialog& context, const Tokens& query, const CandidateSet& candidates) {
  Dialog d = context;
  Turn t;
  t.index = d.turns.size() + 1;
  t.user = query;
  t.system = candidates[0];  // placeholder gold, never read
  d.turns.push_back(std::move(t));
  return expand_instances(d, candidates).back();
}

SlotSchema schema_for(const GenerateSettings& g) { return restaurant_schema(g.slots); }

std::string audit_to_json(const FoldAudit& a) {
  nlohmann::ordered_json j;
  j["overlaps"] = a.overlaps;
  j["meta_counts"] = a.meta_counts;
  auto& folds = j["folds"] = nlohmann::ordered_json::array();
  for (const auto& r : a.records)
    folds.push_back({{"fold", r.fold}, {"trained_on", r.trained_on}, {"scored", r.scored}});
  return j.dump() + "\n";
}

void write_corpus(const std::string& path, const std::vector<Dialog>& dialogs, std::ostream& out) {
  write_text_file(path, serialize_dialogs(dialogs));
  out << "wrote " << path << " (" << dialogs.size() << " dialogs)\n";
}

}  // namespace

void cmd_generate(const ExperimentConfig& cfg, std::ostream& out) {
  const auto& g = cfg.generate;
  GeneratorConfig gen;
  gen.schema = schema_for(g);
  gen.state_prob = g.state_prob;
  auto make = [&](std::size_t n, std::uint64_t offset) {
    gen.n_dialogs = n;
    gen.seed = cfg.seed + offset;
    return generate_synthetic_corpus(gen);
  };
  const auto train = make(g.train_dialogs, 0);
  const auto dev = make(g.dev_dialogs, 1);
  const auto test = make(g.test_dialogs, 2);
  write_corpus(cfg.paths.train, train.dialogs, out);
  write_corpus(cfg.paths.dev, dev.dialogs, out);
  write_corpus(cfg.paths.test, test.dialogs, out);
  write_text_file(cfg.paths.candidates, serialize_candidates(train.candidates));
  out << "wrote " << cfg.paths.candidates << " (" << train.candidates.size() << " candidates)\n";

  for (const auto& profile : noise_profiles(g)) {
    NoiseConfig nc;
    nc.schema = gen.schema;
    std::uint64_t offset = 3;
    if (profile == "disfluency") {
      nc.disfluency_rate = g.disfluency_rate;
    } else {
      nc.substitution_rate = g.substitution_rate;
      nc.lexicon = g.lexicon.empty() ? default_confusion_lexicon() : parse_confusion_lexicon(read_text_file(g.lexicon));
      offset = 4;
    }
    NoiseStats stats;
    const auto noisy = inject_noise(test.dialogs, nc, cfg.seed + offset, &stats);
    write_corpus(test_variant_path(cfg.paths.test, profile), noisy, out);
    if (profile == "disfluency")
      out << "  " << stats.disfluencies << " disfluent of " << stats.utterances_seen << " user turns\n";
    else
      out << "  " << stats.tokens_substituted << " substituted of " << stats.tokens_seen << " user tokens\n";
  }
}

void cmd_train(const ExperimentConfig& cfg, const std::string& stage, std::ostream& out) {
  const auto paths = artifact_paths(cfg);
  const auto candidates = load_candidates(read_text_file(cfg.paths.candidates));
  const auto train = load_instances(cfg.paths.train, candidates);
  const auto t0 = Clock::now();
  auto done = [&](std::string_view what, const std::vector<double>& trace) {
    out << what << ": final loss " << (trace.empty() ? 0.0 : trace.back()) << ", " << fixed(seconds_since(t0), 1)
        << "s\n";
  };
  auto save_matcher = [&](const Matcher& m) {
    save_container(paths.matcher, m.to_container());
    out << "wrote " << paths.matcher << '\n';
  };

  if (stage == "bds") {
    const auto r = train_bds(train, candidates, cfg.bds, cfg.seed);
    done("bds", r.loss_trace);
    save_container(paths.bds, r.model.to_container());
    out << "wrote " << paths.bds << '\n';
  } else if (stage == "match") {
    const auto m = train_matcher(cfg.matcher, train, candidates, cfg.match, cfg.seed);
    done(matcher_name(cfg.matcher), m->loss_trace());
    save_matcher(*m);
  } else if (stage == "rerank") {
    const auto bds = MemNN::from_container(require(paths.bds, "bds model", "bds", kBdsKind));
    if (cfg.rerank == RerankKind::kRule) {
      // the rule has no parameters of its own; only the full-data matcher is needed
      const auto m = train_matcher(cfg.matcher, train, candidates, cfg.match, cfg.seed);
      done(std::string(matcher_name(cfg.matcher)) + " (rule)", m->loss_trace());
      save_matcher(*m);
      return;
    }
    if (!provides_embeddings(cfg.matcher))
      throw DataError("stacking needs a matcher with context/answer embeddings (mmn or qalstm), not " +
                      std::string(matcher_name(cfg.matcher)));
    const MatcherFactory factory = [&](const std::vector<RankingInstance>& t, std::uint64_t seed) {
      return train_matcher(cfg.matcher, t, candidates, cfg.match, seed);
    };
    const auto folds = split_folds(train, cfg.folds, cfg.seed);
    auto st = train_stacking(train, candidates, bds, factory, folds, cfg.features, cfg.meta, cfg.seed);
    out << "folds: " << cfg.folds << ", overlaps " << st.audit.overlaps << ", meta instances "
        << st.oof.y_bds.size() << '\n';
    done("stacking", st.loss_trace);
    save_matcher(*st.matcher);
    save_container(paths.oof, oof_to_container(st.oof));
    save_container(paths.meta, st.meta.to_container());
    write_text_file(paths.audit, audit_to_json(st.audit));
    out << "wrote " << paths.oof << "\nwrote " << paths.meta << "\nwrote " << paths.audit << '\n';
  } else {
    throw DataError("unknown training stage '" + stage + "' (bds, match, rerank)");
  }
}

std::vector<EvalReport> cmd_eval(const ExperimentConfig& cfg, bool ablation, std::ostream& out) {
  const auto paths = artifact_paths(cfg);
  const Models m = load_models(cfg);
  const auto test = load_instances(test_variant_path(cfg.paths.test, cfg.test_set), m.candidates);
  const auto scores = score_all(test, m.bds, *m.matcher);

  EvalOptions opts;
  opts.matcher_name = matcher_name(cfg.matcher);
  opts.rule = cfg.rule;
  opts.vote = cfg.vote;
  opts.topk = cfg.topk;
  opts.config = {{"seed", std::to_string(cfg.seed)},
                 {"matcher", opts.matcher_name},
                 {"rerank", std::string(rerank_name(cfg.rerank))},
                 {"test_set", cfg.test_set}};
  auto reports = evaluate(test, m.candidates, scores, m.meta ? &*m.meta : nullptr, opts);
  out << format_table(reports);
  write_text_file(paths.report, reports_to_jsonl(reports));
  out << "wrote " << paths.report << '\n';

  if (ablation) {
    if (!provides_embeddings(cfg.matcher))
      throw DataError("ablation needs a matcher with context/answer embeddings (mmn or qalstm)");
    const auto train = load_instances(cfg.paths.train, m.candidates);
    const auto oof = oof_from_container(require(paths.oof, "stacking cache", "rerank", kOofKind));
    if (oof.y_bds.size() != train.size())
      throw DataError("stacking cache covers " + std::to_string(oof.y_bds.size()) + " instances but " +
                      cfg.paths.train + " has " + std::to_string(train.size()));
    AblationSetup setup;
    setup.train = &train;
    setup.oof = &oof;
    setup.candidates = &m.candidates;
    setup.test = &test;
    setup.test_scores = &scores;
    setup.features = cfg.features;
    setup.meta = cfg.meta;
    setup.seed = cfg.seed;
    setup.opts = opts;
    setup.opts.topk = 0;
    const auto rows = run_ablation(setup);
    out << '\n' << format_table(rows);
    write_text_file(paths.ablation, reports_to_jsonl(rows));
    out << "wrote " << paths.ablation << '\n';
    reports.insert(reports.end(), rows.begin(), rows.end());
  }
  return reports;
}

RankResult cmd_rank(const ExperimentConfig& cfg, const std::string& context_path, const std::string& query,
                    std::size_t k, std::ostream& out) {
  const Models m = load_models(cfg);
  Dialog context;
  if (!context_path.empty()) {
    const auto dialogs = parse_dialog_file(read_text_file(context_path));
    if (dialogs.size() > 1) throw DataError(context_path + ": expected one dialog, found " + std::to_string(dialogs.size()));
    if (!dialogs.empty()) context = dialogs.front();
  }
  const auto tokens = tokenize(query);
  if (tokens.empty()) throw DataError("empty query");
  auto r = rank_instance(m, cfg, next_instance(context, tokens, m.candidates));
  print_views(r, m, k, out);
  out << "choice: " << m.texts[r.decision.chosen] << "  [" << provenance_name(r.decision.provenance) << "]\n";
  return r;
}

void cmd_chat(const ExperimentConfig& cfg, bool debug, std::istream& in, std::ostream& out) {
  const Models m = load_models(cfg);
  Dialog history;
  std::string line;
  out << "> " << std::flush;
  while (std::getline(in, line)) {
    const auto tokens = tokenize(line);
    if (line == ":quit") break;
    if (line == ":reset") {
      history.turns.clear();
      out << "(history cleared)\n";
    } else if (!tokens.empty()) {
      auto inst = next_instance(history, tokens, m.candidates);
      const auto r = rank_instance(m, cfg, inst);
      if (debug) {
        print_views(r, m, 3, out);
        out << "provenance: " << provenance_name(r.decision.provenance) << '\n';
      }
      out << "system: " << m.texts[r.decision.chosen] << '\n';
      Turn t;
      t.index = history.turns.size() + 1;
      t.user = tokens;
      t.system = m.candidates[r.decision.chosen];
      history.turns.push_back(std::move(t));
    }
    out << "> " << std::flush;
  }
  out << '\n';
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Response re-ranking for task-oriented dialog: generate data, train, evaluate, rank, chat.",
               "ctxrr"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, matcher, rerank, stage, context, query;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> topk;
  bool ablation = false, debug = false;
  app.add_option("--config", config_path, "Experiment config file (key = value with [section] headers)");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--matcher", matcher, "Matching model")->check(CLI::IsMember({"tfidf", "nn", "slemb", "mmn", "qalstm"}));
  app.add_option("--rerank", rerank, "Re-ranker")->check(CLI::IsMember({"rule", "stacking"}));
  app.add_option("--topk", topk, "eval: acc@1..K columns; rank: rows per scorer");
  app.add_flag("--ablation", ablation, "eval: run the four-way feature ablation");
  app.add_flag("--debug", debug, "chat: show the top 3 of every scorer");

  auto* gen = app.add_subcommand("generate", "Write synthetic train/dev/test dialogs and the candidate file");
  auto* train = app.add_subcommand("train", "Train a stage: bds, match or rerank");
  train->add_option("stage", stage, "bds | match | rerank")->required()->check(CLI::IsMember({"bds", "match", "rerank"}));
  auto* ev = app.add_subcommand("eval", "Accuracy table and JSON-lines report on the test set");
  auto* rk = app.add_subcommand("rank", "Rank candidates for one query after a dialog context");
  rk->add_option("--context", context, "Dialog-format file with the history so far");
  rk->add_option("--query", query, "Current user utterance")->required();
  auto* ch = app.add_subcommand("chat", "Interactive session over the trained models");
  auto* cf = app.add_subcommand("config", "Print the effective configuration");

  std::vector<std::string> reversed(args.rbegin(), args.rend());  // CLI11 consumes from the back
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (!matcher.empty()) cfg.matcher = parse_matcher_kind(matcher);
    if (!rerank.empty()) cfg.rerank = parse_rerank_kind(rerank);
    if (topk) cfg.topk = *topk;
    validate_config(cfg);

    if (gen->parsed()) cmd_generate(cfg, out);
    else if (train->parsed()) cmd_train(cfg, stage, out);
    else if (ev->parsed()) cmd_eval(cfg, ablation, out);
    else if (rk->parsed()) cmd_rank(cfg, context, query, topk.value_or(3), out);
    else if (ch->parsed()) cmd_chat(cfg, debug, in, out);
    else if (cf->parsed()) out << format_config(cfg);
    return 0;
  } catch (const MissingArtifact& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    // DataError, ParseError, NumericError, filesystem failures
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace ctxrr
