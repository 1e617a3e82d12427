#include <unistd.h>

#include <filesystem>
#include <sstream>

#include "ctxrr/cli/commands.hpp"
#include "ctxrr/corpus/dialog.hpp"
#include "ctxrr/numeric/error.hpp"
#include "doctest.h"

using namespace ctxrr;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = run_cli(args, in, out, err);
  return {code, out.str(), err.str()};
}

fs::path make_temp_dir() {
  std::string tmpl = (fs::temp_directory_path() / "ctxrr_cli_XXXXXX").string();
  REQUIRE(mkdtemp(tmpl.data()) != nullptr);
  return tmpl;
}

ExperimentConfig small_config(const fs::path& dir) {
  ExperimentConfig c;
  c.seed = 11;
  c.paths.train = (dir / "data/train.txt").string();
  c.paths.dev = (dir / "data/dev.txt").string();
  c.paths.test = (dir / "data/test.txt").string();
  c.paths.candidates = (dir / "data/candidates.txt").string();
  c.paths.model_dir = (dir / "models").string();
  c.generate.train_dialogs = 40;
  c.generate.dev_dialogs = 5;
  c.generate.test_dialogs = 10;
  c.bds.dim = 24;
  c.bds.epochs = 6;
  c.match.dim = 16;
  c.match.hops = 2;
  c.match.epochs = 3;
  c.meta.hidden = 24;
  c.meta.epochs = 3;
  return c;
}

std::string write_config(const fs::path& dir, const ExperimentConfig& c, const std::string& name = "exp.conf") {
  const auto p = (dir / name).string();
  write_text_file(p, format_config(c));
  return p;
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config defaults and round trip") {
  const ExperimentConfig d;
  CHECK(d.bds.dim == 128);
  CHECK(d.bds.hops == 3);
  CHECK(d.match.hidden == 64);
  CHECK(d.match.margin == 0.5);
  CHECK(d.folds == 5);
  CHECK(d.match.neg_tries == 100);
  CHECK(d.features.mask_width == 10);
  CHECK(d.rule.top_n == 5);
  CHECK(d.meta.hidden == 700);
  CHECK(d.match.epochs == 20);
  CHECK(d.match.batch == 32);
  CHECK(d.meta.batch == 64);
  CHECK(parse_config("") == d);
  CHECK(parse_config(format_config(d)) == d);

  ExperimentConfig c = d;
  c.seed = 18446744073709551615ULL;
  c.paths.model_dir = "out dir/models";
  c.generate.profiles = "disfluency asr";
  c.generate.substitution_rate = 0.1 + 0.2;
  c.bds.lr = 1.0 / 3.0;
  c.bds.temporal = false;
  c.matcher = MatcherKind::kQalstm;
  c.match.init_scale = 1e-7;
  c.rerank = RerankKind::kRule;
  c.features.use_ans = false;
  c.meta.lr = 2.5e-4;
  c.topk = 3;
  c.test_set = "asr";
  CHECK(parse_config(format_config(c)) == c);
  CHECK(format_config(parse_config(format_config(c))) == format_config(c));
}

TEST_CASE("config parsing") {
  const auto c = parse_config("# comment\nseed = 9\n\n[match]\nkind = slemb  # trailing\nlr=0.01\n[rerank]\nkind = rule\n");
  CHECK(c.seed == 9);
  CHECK(c.matcher == MatcherKind::kSlemb);
  CHECK(c.match.lr == 0.01);
  CHECK(c.rerank == RerankKind::kRule);
  CHECK_THROWS_AS(parse_config("[bogus]\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[bds]\nwidth = 3\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[bds]\ndim = -3\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[bds]\ndim = 3x\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[bds]\ndim\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[match]\nkind = lstm\n"), ParseError);
  CHECK_THROWS_AS(parse_config("[bds]\ndim = 0\n"), DataError);
  CHECK_THROWS_AS(parse_config("[rerank]\nfolds = 1\n"), DataError);
  CHECK_THROWS_AS(parse_config("[generate]\nsubstitution_rate = 1.5\n"), DataError);
  CHECK_THROWS_AS(parse_config("[generate]\nprofiles = loud\n"), DataError);
  try {
    parse_config("seed = 1\n[bds]\nhops = many\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK(test_variant_path("data/test.txt", "asr") == "data/test.asr.txt");
  CHECK(test_variant_path("data/test.txt", "none") == "data/test.txt");
}

TEST_CASE("usage and artifact exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"train"}).code == 1);
  CHECK(run({"train", "everything"}).code == 1);
  CHECK(run({"--matcher", "lstm", "eval"}).code == 1);
  CHECK(run({"--config", "/nonexistent/exp.conf", "eval"}).code == 3);

  const auto dir = make_temp_dir();
  write_text_file((dir / "bad.conf").string(), "[bds]\ndim = zero\n");
  const auto bad = run({"--config", (dir / "bad.conf").string(), "eval"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);

  const auto cfg = write_config(dir, small_config(dir));
  CHECK(run({"--config", cfg, "train", "bds"}).code == 3);  // no corpus yet
  REQUIRE(run({"--config", cfg, "generate"}).code == 0);
  const auto rr = run({"--config", cfg, "train", "rerank"});
  CHECK(rr.code == 3);
  CHECK(rr.err.find("train bds") != std::string::npos);
  CHECK(run({"--config", cfg, "eval"}).code == 3);
  REQUIRE(run({"--config", cfg, "train", "bds"}).code == 0);
  CHECK(run({"--config", cfg, "--matcher", "tfidf", "train", "rerank"}).code == 2);
  CHECK(run({"--config", cfg, "--rerank", "stacking", "eval"}).code == 3);  // no meta model yet
  fs::remove_all(dir);
}

TEST_CASE("generate writes the corpus files deterministically") {
  const auto dir = make_temp_dir();
  auto c = small_config(dir);
  REQUIRE(run({"--config", write_config(dir, c), "generate"}).code == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "data")) files += e.is_regular_file();
  CHECK(files == 4);
  const auto train = read_text_file(c.paths.train);
  const auto cands = read_text_file(c.paths.candidates);
  CHECK(parse_dialog_file(train).size() == 40);
  CHECK(parse_dialog_file(read_text_file(c.paths.dev)).size() == 5);
  CHECK(load_candidates(cands).size() > 2);

  REQUIRE(run({"--config", write_config(dir, c), "generate"}).code == 0);
  CHECK(read_text_file(c.paths.train) == train);

  c.generate.profiles = "disfluency";
  REQUIRE(run({"--config", write_config(dir, c), "generate"}).code == 0);
  CHECK(read_text_file(c.paths.train) == train);  // the profile leaves training data clean
  const auto clean = parse_dialog_file(read_text_file(c.paths.test));
  const auto noisy = parse_dialog_file(read_text_file(test_variant_path(c.paths.test, "disfluency")));
  REQUIRE(clean.size() == noisy.size());
  bool changed = false;
  for (std::size_t d = 0; d < clean.size(); ++d) {
    REQUIRE(clean[d].turns.size() == noisy[d].turns.size());
    for (std::size_t t = 0; t < clean[d].turns.size(); ++t) {
      CHECK(clean[d].turns[t].system == noisy[d].turns[t].system);
      changed |= clean[d].turns[t].user != noisy[d].turns[t].user;
    }
  }
  CHECK(changed);

  CHECK(run({"--config", write_config(dir, c), "--seed", "12", "generate"}).code == 0);
  CHECK(read_text_file(c.paths.train) != train);
  fs::remove_all(dir);
}

TEST_CASE("train, eval, rank and chat over a small corpus") {
  const auto dir = make_temp_dir();
  auto c = small_config(dir);
  c.generate.profiles = "disfluency";
  c.test_set = "disfluency";
  const auto cfg = write_config(dir, c);
  const auto paths = artifact_paths(c);
  REQUIRE(run({"--config", cfg, "generate"}).code == 0);

  // rerank straight after bds: stacking trains its own matchers
  REQUIRE(run({"--config", cfg, "train", "bds"}).code == 0);
  const auto tr = run({"--config", cfg, "train", "rerank"});
  REQUIRE(tr.code == 0);
  CHECK(tr.out.find("overlaps 0") != std::string::npos);
  CHECK(tr.out.find("final loss") != std::string::npos);
  const auto bds_bytes = read_text_file(paths.bds);
  const auto meta_bytes = read_text_file(paths.meta);
  const auto match_bytes = read_text_file(paths.matcher);
  REQUIRE(run({"--config", cfg, "train", "bds"}).code == 0);
  REQUIRE(run({"--config", cfg, "train", "rerank"}).code == 0);
  CHECK(read_text_file(paths.bds) == bds_bytes);
  CHECK(read_text_file(paths.meta) == meta_bytes);
  CHECK(read_text_file(paths.matcher) == match_bytes);
  // the stacking matcher is the same full-data matcher `train match` writes
  REQUIRE(run({"--config", cfg, "train", "match"}).code == 0);
  CHECK(read_text_file(paths.matcher) == match_bytes);

  SUBCASE("eval rows, top-K columns and reports") {
    const auto ev = run({"--config", cfg, "--topk", "3", "eval"});
    REQUIRE(ev.code == 0);
    const auto lines = lines_of(ev.out);
    REQUIRE(lines.size() >= 5);
    CHECK(lines[0].find("@3") != std::string::npos);
    CHECK(lines[1].rfind("BDS", 0) == 0);
    CHECK(lines[2].rfind("mmn MAT", 0) == 0);
    CHECK(lines[3].rfind("mmn RR1", 0) == 0);
    CHECK(lines[4].rfind("mmn RR2", 0) == 0);
    const auto reports = reports_from_jsonl(read_text_file(paths.report));
    REQUIRE(reports.size() == 4);
    CHECK(reports[0].topk.size() == 3);
    CHECK(reports[0].config.at("test_set") == "disfluency");
    const auto again = run({"--config", cfg, "--topk", "3", "eval"});
    CHECK(again.out == ev.out);

    const auto ab = run({"--config", cfg, "eval", "--ablation"});
    REQUIRE(ab.code == 0);
    const auto rows = reports_from_jsonl(read_text_file(paths.ablation));
    REQUIRE(rows.size() == 4);
    CHECK(rows[3].model == "w/o ctx & ans");
  }

  SUBCASE("rule re-ranking needs only the full-data matcher") {
    auto r = c;
    r.rerank = RerankKind::kRule;
    r.matcher = MatcherKind::kTfidf;
    const auto rcfg = write_config(dir, r, "rule.conf");
    REQUIRE(run({"--config", rcfg, "train", "rerank"}).code == 0);
    CHECK(fs::exists(artifact_paths(r).matcher));
    CHECK(!fs::exists(artifact_paths(r).meta));
    const auto ev = run({"--config", rcfg, "eval"});
    REQUIRE(ev.code == 0);
    CHECK(lines_of(ev.out).size() == 5);  // header, BDS, MAT, RR1, wrote-line
  }

  SUBCASE("rank prints three descending rows per scorer with verbatim text") {
    const auto cands_text = read_text_file(c.paths.candidates);
    std::vector<std::string> verbatim;
    for (const auto& l : lines_of(cands_text))
      if (!l.empty()) verbatim.push_back(l.substr(l.find(' ') + 1));
    write_text_file((dir / "ctx.txt").string(), "1 hello\thello what can i help you with today\n");
    const auto rk = run({"--config", cfg, "rank", "--context", (dir / "ctx.txt").string(), "--query",
                         "can you book a table"});
    REQUIRE(rk.code == 0);
    const auto lines = lines_of(rk.out);
    REQUIRE(lines.size() == 13);
    for (std::size_t s = 0; s < 3; ++s) {
      double prev = 1e300;
      for (std::size_t i = 1; i <= 3; ++i) {
        const auto& row = lines[4 * s + i];
        std::istringstream is(row);
        std::size_t rank;
        double score;
        is >> rank >> score;
        CHECK(rank == i);
        CHECK(score <= prev);
        prev = score;
        std::string rest;
        std::getline(is, rest);
        REQUIRE(rest.rfind("  ", 0) == 0);
        CHECK(std::find(verbatim.begin(), verbatim.end(), rest.substr(2)) != verbatim.end());
      }
    }
    CHECK(lines[12].rfind("choice: ", 0) == 0);
    write_text_file((dir / "broken.txt").string(), "x hello\n");
    CHECK(run({"--config", cfg, "rank", "--context", (dir / "broken.txt").string(), "--query", "hi"}).code == 2);
  }

  SUBCASE("chat debug pane, reset and replay through rank") {
    const std::vector<std::string> utterances{"hello", "can you book a table", "french food", "in paris",
                                              "cheap please"};
    std::string input;
    for (const auto& u : utterances) input += u + "\n";
    input += ":reset\nhello\n:quit\nnever read\n";
    const auto ch = run({"--config", cfg, "chat", "--debug"}, input);
    REQUIRE(ch.code == 0);
    std::vector<std::string> replies;
    std::size_t pane_rows = 0, provenance = 0;
    for (const auto& l : lines_of(ch.out)) {
      if (l.find("system: ") != std::string::npos) replies.push_back(l.substr(l.find("system: ") + 8));
      if (l.rfind("  ", 0) == 0) ++pane_rows;
      if (l.rfind("provenance: ", 0) == 0) ++provenance;
    }
    REQUIRE(replies.size() == utterances.size() + 1);
    CHECK(provenance == replies.size());
    CHECK(pane_rows == 9 * replies.size());
    CHECK(replies.back() == replies.front());  // after :reset the first-turn path again

    std::string transcript;
    for (std::size_t t = 0; t < utterances.size(); ++t) {
      std::ostringstream out;
      cmd_rank(c, t == 0 ? "" : (dir / "transcript.txt").string(), utterances[t], 3, out);
      CHECK(read_text_file(c.paths.candidates).find(replies[t]) != std::string::npos);
      const auto chosen = out.str().substr(out.str().find("choice: ") + 8);
      CHECK(chosen.rfind(replies[t] + "  [", 0) == 0);
      transcript += std::to_string(t + 1) + " " + utterances[t] + "\t" + replies[t] + "\n";
      write_text_file((dir / "transcript.txt").string(), transcript);
    }

    const auto plain = run({"--config", cfg, "chat"}, "hello\n");
    CHECK(plain.out.find("provenance") == std::string::npos);
    CHECK(plain.out.find("system: " + replies.front()) != std::string::npos);
  }
  fs::remove_all(dir);
}
