#include <gtest/gtest.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "valex/error.hpp"
#include "valex/pipeline.hpp"

using namespace valex;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

bool mentions(const CommandResult& r, const std::string& needle) {
  for (const auto& d : r.diagnostics) {
    if (d.find(needle) != std::string::npos) return true;
  }
  return false;
}

struct Workspace {
  fixtures::TempDir dir;
  BagOfTokensEncoder encoder;
  fixtures::SeparableCorpus corpus;
  json config;

  explicit Workspace(std::size_t videos = 120) {
    corpus = fixtures::make_separable_corpus(videos, 12, 4, encoder);
    fixtures::write_corpus_files(dir.path(), corpus.manifest, corpus.gold);
    config = {{"corpus", "manifest.jsonl"},
              {"gold", "gold.csv"},
              {"output_dir", "out"},
              {"split", {{"train", 0.7}, {"validation", 0.1}, {"test", 0.2}, {"seed", 3}}},
              {"backends",
               {{"scripter", {{"type", "mock"}, {"initial_backoff_ms", 0}, {"rules", fixtures::script_rules(corpus.scripts)}}},
                {"llm", {{"type", "mock"}, {"initial_backoff_ms", 0}, {"response", "NONE"}}}}},
              {"script_backend", "scripter"},
              {"pipelines",
               json::array({{{"id", "sup"}, {"mode", "two_step_supervised"}},
                            {{"id", "direct"}, {"mode", "direct_llm"}, {"backend", "llm"}}})},
              {"train", {{"epochs", 30}}},
              {"label_min_count", 1}};
  }

  RunConfig load(const std::vector<std::string>& overrides = {}) {
    fixtures::write_text(dir / "run.json", config.dump(2));
    return load_run_config(dir / "run.json", overrides);
  }
  fs::path out() const { return dir / "out"; }
};

}  // namespace

TEST(RunConfig, ResolvesPathsAndAppliesOverrides) {
  Workspace ws(30);
  const auto cfg = ws.load({"train.epochs=5", "split.stratify=none", "backends.llm.max_retries=0"});
  EXPECT_EQ(cfg.corpus, ws.dir / "manifest.jsonl");
  EXPECT_EQ(cfg.output_dir, ws.out());
  EXPECT_EQ(cfg.train.epochs, 5u);
  EXPECT_EQ(cfg.stratify, StratifyKey::None);
  EXPECT_EQ(cfg.backends.at("llm").config.max_retries, 0u);
  EXPECT_EQ(cfg.pipelines.size(), 2u);
  EXPECT_EQ(cfg.pipelines[1].mode, PipelineMode::DirectLlm);
}

TEST(RunConfig, HashIgnoresOutputDirOnly) {
  Workspace ws(30);
  const auto a = config_hash(ws.load());
  EXPECT_EQ(a, config_hash(ws.load({"output_dir=elsewhere"})));
  EXPECT_NE(a, config_hash(ws.load({"split.seed=4"})));
  EXPECT_EQ(a.size(), 64u);
}

TEST(RunConfig, RejectsBadDocuments) {
  Workspace ws(30);
  const auto base = ws.dir.path();
  EXPECT_EQ(code_of([&] { parse_run_config("[]", base); }), ErrorCode::Configuration);
  EXPECT_EQ(code_of([&] { parse_run_config(R"({"corpus":"m","gold":"g","output_dir":"o","colour":1})", base); }),
            ErrorCode::Configuration);
  EXPECT_EQ(code_of([&] { ws.load({"train.epochs=0"}); }), ErrorCode::Configuration);
  EXPECT_EQ(code_of([&] { ws.load({"pipelines=[{\"id\":\"x\",\"mode\":\"direct_llm\",\"backend\":\"nope\"}]"}); }),
            ErrorCode::Configuration);
  EXPECT_EQ(code_of([&] { ws.load({"pipelines=[{\"id\":\"x\",\"mode\":\"psychic\"}]"}); }), ErrorCode::Configuration);
  EXPECT_EQ(code_of([&] { load_run_config(base / "missing.json"); }), ErrorCode::Configuration);
}

TEST(Ingest, EmptyManifestIsZeroStats) {
  Workspace ws(30);
  fixtures::write_text(ws.dir / "manifest.jsonl", "");
  fixtures::write_text(ws.dir / "gold.csv", "video_id,annotator_id,value_name,label\n");
  const auto r = cmd_ingest(ws.load());
  EXPECT_EQ(r.exit_code, kExitOk);
  const auto stats = json::parse(fixtures::read_text(ws.out() / "reports/corpus-stats.json"));
  EXPECT_EQ(stats["n_videos"], 0);
  EXPECT_EQ(stats["n_labels"], 0);
}

TEST(Ingest, MalformedGoldNamesTheLine) {
  Workspace ws(30);
  auto gold = fixtures::read_text(ws.dir / "gold.csv");
  gold += "v100000,gold,ACHIEVEMENT,7\n";
  fixtures::write_text(ws.dir / "gold.csv", gold);
  const auto lines = std::count(gold.begin(), gold.end(), '\n');
  const auto r = cmd_ingest(ws.load());
  EXPECT_EQ(r.exit_code, kExitValidation);
  EXPECT_TRUE(mentions(r, "gold.csv:" + std::to_string(lines))) << r.diagnostics.front();
}

TEST(Ingest, MissingGoldIsValidationFailure) {
  Workspace ws(30);
  fixtures::write_text(ws.dir / "gold.csv", "v100000,gold,NONE,0\n");
  const auto r = cmd_ingest(ws.load());
  EXPECT_EQ(r.exit_code, kExitValidation);
  EXPECT_TRUE(mentions(r, "v100001"));
}

TEST(Scripts, ResumeMakesNoBackendCalls) {
  Workspace ws(30);
  const auto cfg = ws.load();
  const auto first = cmd_scripts(cfg);
  EXPECT_EQ(first.exit_code, kExitOk);
  EXPECT_EQ(first.backend_calls, 30u);
  EXPECT_EQ(fixtures::read_text(ws.out() / "scripts/v100003.txt"), serialize_script(ws.corpus.scripts.at("v100003")));
  fs::remove_all(ws.out() / "cache");
  const auto second = cmd_scripts(cfg);
  EXPECT_EQ(second.exit_code, kExitOk);
  EXPECT_EQ(second.backend_calls, 0u);
}

TEST(Scripts, FailuresAreRecorded) {
  Workspace ws(30);
  ws.config["backends"]["scripter"]["fail_when_contains"] = {"v100007.mp4"};
  ws.config["backends"]["scripter"]["max_retries"] = 1;
  const auto r = cmd_scripts(ws.load());
  EXPECT_EQ(r.exit_code, kExitPartial);
  const auto failures = json::parse(fixtures::read_text(ws.out() / "scripts/failures.json"));
  ASSERT_EQ(failures.size(), 1u);
  EXPECT_EQ(failures[0]["video_id"], "v100007");
  EXPECT_FALSE(fs::exists(ws.out() / "scripts/v100007.txt"));
}

TEST(Run, SupervisedWithoutModelOrTrainingFails) {
  Workspace ws(60);
  ws.config["pipelines"] = json::array({{{"id", "sup"}, {"mode", "two_step_supervised"}, {"train", false}},
                                        {{"id", "direct"}, {"mode", "direct_llm"}, {"backend", "llm"}}});
  const auto r = cmd_run(ws.load());
  EXPECT_EQ(r.exit_code, kExitPartial);
  EXPECT_TRUE(mentions(r, "training is disabled"));
  const auto manifest = json::parse(fixtures::read_text(ws.out() / "run-manifest.json"));
  EXPECT_EQ(manifest["pipelines"][0]["status"], "failed");
  EXPECT_EQ(manifest["pipelines"][1]["status"], "ok");
  const auto csv = fixtures::read_text(ws.out() / "reports/comparison.csv");
  EXPECT_TRUE(csv.starts_with("row,direct,best\n")) << csv.substr(0, 40);
}

TEST(Run, PredictWithoutModelIsPrecondition) {
  Workspace ws(60);
  const auto r = cmd_predict(ws.load(), "sup");
  EXPECT_NE(r.exit_code, kExitOk);
}

TEST(Run, TrainWithoutScriptsIsPrecondition) {
  Workspace ws(60);
  const auto r = cmd_train(ws.load(), "sup");
  EXPECT_NE(r.exit_code, kExitOk);
  EXPECT_TRUE(mentions(r, "no training data"));
}

TEST(Run, EndToEndWritesAllArtifacts) {
  Workspace ws(300);
  const auto cfg = ws.load();
  const auto r = cmd_run(cfg);
  ASSERT_EQ(r.exit_code, kExitOk) << (r.diagnostics.empty() ? "" : r.diagnostics.front());
  for (const char* rel : {"reports/corpus-stats.json", "reports/sup.json", "reports/direct.json",
                          "reports/comparison.csv", "reports/radar-present.tsv", "reports/radar-conflicted.tsv",
                          "plots/value-counts.svg", "plots/f-scores.svg", "plots/radar-present.svg",
                          "predictions/sup.csv", "predictions/direct.csv", "models/sup/metadata.json",
                          "run-manifest.json"}) {
    EXPECT_TRUE(fs::exists(ws.out() / rel)) << rel;
  }
  const auto manifest = json::parse(fixtures::read_text(ws.out() / "run-manifest.json"));
  EXPECT_EQ(manifest["config_hash"], config_hash(cfg));
  EXPECT_EQ(manifest["exit_code"], 0);
  const auto sup = json::parse(fixtures::read_text(ws.out() / "reports/sup.json"));
  EXPECT_GE(sup["aggregates"]["all"]["weighted_f"].get<double>(), 0.8);
  const auto direct = json::parse(fixtures::read_text(ws.out() / "reports/direct.json"));
  EXPECT_EQ(direct["aggregates"]["all"]["weighted_f"].get<double>(), 0.0);

  // A second run reuses scripts and cached answers and reproduces the reports.
  const auto comparison = fixtures::read_text(ws.out() / "reports/comparison.csv");
  const auto again = cmd_run(cfg);
  EXPECT_EQ(again.exit_code, kExitOk);
  EXPECT_EQ(again.backend_calls, 0u);
  EXPECT_EQ(fixtures::read_text(ws.out() / "reports/comparison.csv"), comparison);
}

TEST(Agreement, WritesCoefficientsAndConsolidatedGold) {
  fixtures::TempDir dir;
  fixtures::write_text(dir / "ann.csv",
                       "v1,a,FACE,1\nv1,b,FACE,1\n"
                       "v2,a,HEDONISM,1\nv2,b,HEDONISM,-1\nv2,r,HEDONISM,-1\n"
                       "v3,a,NONE,0\nv3,b,NONE,0\n");
  const auto r = cmd_agreement({dir / "ann.csv", "r", dir / "out"});
  ASSERT_EQ(r.exit_code, kExitOk) << (r.diagnostics.empty() ? "" : r.diagnostics.front());
  const auto j = json::parse(fixtures::read_text(dir / "out/agreement.json"));
  EXPECT_TRUE(j.dump().find("gwet_ac1") != std::string::npos);
  const auto consolidated = fixtures::read_text(dir / "out/consolidated.csv");
  EXPECT_NE(consolidated.find("v2,"), std::string::npos);
  EXPECT_NE(consolidated.find("HEDONISM,-1"), std::string::npos);

  fixtures::write_text(dir / "bad.csv", "v1,a,FACE,1\nv1,b,FACE,-1\n");
  EXPECT_EQ(cmd_agreement({dir / "bad.csv", "r", dir / "out2"}).exit_code, kExitValidation);
}

TEST(Run, IngestOnlyConfigHasNoPipelines) {
  Workspace ws(30);
  ws.config.erase("pipelines");
  ws.config.erase("backends");
  ws.config.erase("script_backend");
  const auto r = cmd_run(ws.load());
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_TRUE(fs::exists(ws.out() / "reports/corpus-stats.json"));
  EXPECT_TRUE(fs::exists(ws.out() / "run-manifest.json"));
}
