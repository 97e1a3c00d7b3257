#include "cli.h"

#include <fstream>
#include <random>
#include <sstream>

#include "docspot/box.h"
#include "docspot/features.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace docspot::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "docspot");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir;
    corpus_ = (dir_->path() / "corpus").string();
    index_ = (dir_->path() / "index").string();
    ASSERT_EQ(run_cli({"synth", "--out", corpus_, "--pages", "5", "--seed", "3"}).code, 0);
    ASSERT_EQ(run_cli({"index", "--pages", corpus_ + "/pages", "--out", index_, "--workers", "1"}).code, 0);
  }
  static void TearDownTestSuite() { delete dir_; }

  static fs::path tmp(const std::string& name) { return dir_->path() / name; }

  static testing::TempDir* dir_;
  static std::string corpus_;
  static std::string index_;
};

testing::TempDir* CliTest::dir_ = nullptr;
std::string CliTest::corpus_;
std::string CliTest::index_;

TEST_F(CliTest, IndexIsDeterministic) {
  const std::string again = tmp("index2").string();
  const auto r = run_cli({"index", "--pages", corpus_ + "/pages", "--out", again, "--workers", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("after edge filter"), std::string::npos);
  for (const char* f : {"meta.json", "features.psfeat", "codes.pshash"})
    EXPECT_EQ(slurp(fs::path(index_) / f), slurp(fs::path(again) / f)) << f;
}

TEST_F(CliTest, IndexMissingDirectoryIsADataError) {
  const auto r = run_cli({"index", "--pages", tmp("nope").string(), "--out", tmp("x").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, IndexRejectsCrossedThresholds) {
  const auto r = run_cli({"index", "--pages", corpus_ + "/pages", "--out", tmp("x").string(),
                          "--canny-low", "0.5", "--canny-high", "0.2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("canny-low"), std::string::npos);
}

TEST_F(CliTest, ProposeOnlyWritesReportAndManifest) {
  const auto report = tmp("proposals.jsonl"), manifest = tmp("crops.csv");
  const auto r = run_cli({"index", "--pages", corpus_ + "/pages", "--propose-only",
                          "--proposals-report", report.string(), "--manifest-out", manifest.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report_lines = lines(slurp(report));
  ASSERT_EQ(report_lines.size(), 5u);
  const auto first = nlohmann::json::parse(report_lines[0]);
  EXPECT_EQ(first["page"], "page_000");
  EXPECT_GE(first["raw"].get<int>(), first["after_size"].get<int>());
  const auto rows = lines(slurp(manifest));
  ASSERT_GT(rows.size(), 1u);
  EXPECT_EQ(rows[0], "region_id,image_path,x,y,w,h");
  EXPECT_EQ(rows[1].rfind("0,", 0), 0u);
  EXPECT_NE(rows[1].find("page_000.png"), std::string::npos);
  EXPECT_FALSE(fs::exists(tmp("x")));
}

// Writes a feature file with one random row per manifest region.
void write_features_for(const fs::path& manifest, const fs::path& out, std::size_t dims) {
  std::vector<std::uint64_t> ids;
  const auto rows = lines(slurp(manifest));
  for (std::size_t i = 1; i < rows.size(); ++i) ids.push_back(std::stoull(rows[i].substr(0, rows[i].find(','))));
  std::mt19937 rng(1);
  std::normal_distribution<float> g;
  std::vector<float> values(ids.size() * dims);
  for (auto& v : values) v = g(rng);
  write_feature_file(out, ids, values, dims);
}

TEST_F(CliTest, ExternalFeaturesBuildAndMismatchIsReported) {
  const auto manifest = tmp("ext.csv");
  ASSERT_EQ(run_cli({"index", "--pages", corpus_ + "/pages", "--propose-only", "--manifest-out",
                     manifest.string()}).code, 0);
  write_features_for(manifest, tmp("good.psfeat"), 1024);
  write_features_for(manifest, tmp("bad.psfeat"), 512);
  const auto ext_index = tmp("ext_index").string();
  const auto ok = run_cli({"index", "--pages", corpus_ + "/pages", "--out", ext_index, "--profile",
                           "vgg19-block4-5", "--features", tmp("good.psfeat").string()});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto bad = run_cli({"index", "--pages", corpus_ + "/pages", "--out", tmp("bad_index").string(),
                            "--profile", "vgg19-block4-5", "--features", tmp("bad.psfeat").string()});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.err.find("512"), std::string::npos) << bad.err;
  EXPECT_NE(bad.err.find("1024"), std::string::npos) << bad.err;

  const auto bench = run_cli({"bench", "--index", ext_index, "--query-features", tmp("good.psfeat").string(),
                              "-n", "10"});
  ASSERT_EQ(bench.code, 0) << bench.err;
  EXPECT_NE(bench.out.find("32.0"), std::string::npos) << bench.out;
  EXPECT_NE(bench.out.find("dims: 1024"), std::string::npos);

  // Image queries cannot be embedded for an external profile.
  const auto img = run_cli({"query", "--index", ext_index, corpus_ + "/queries/q0_0.png"});
  EXPECT_EQ(img.code, 3);
}

TEST_F(CliTest, QueryFindsPlantedGlyph) {
  const auto gt = nlohmann::json::parse(slurp(fs::path(corpus_) / "gt.json"));
  const auto& q = gt["queries"][0];
  const auto r = run_cli({"query", "--index", index_, "--mode", "hamming", "-n", "20",
                          corpus_ + "/queries/" + q["id"].get<std::string>() + ".png"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 20u);
  const auto top = nlohmann::json::parse(rows[0]);
  EXPECT_EQ(top["rank"], 1);
  EXPECT_EQ(top["mode"], "hamming");
  EXPECT_TRUE(top["distance"].is_number_integer());
  const BoundingBox box{top["x"], top["y"], top["w"], top["h"]};
  double best = 0;
  for (const auto& o : q["occurrences"]) {
    if (o["page"] != top["page_id"]) continue;
    best = std::max(best, iou(box, {o["bbox"][0], o["bbox"][1], o["bbox"][2], o["bbox"][3]}));
  }
  EXPECT_GE(best, 0.5);

  const auto pp = run_cli({"query", "--index", index_, "-n", "20", "--pp",
                           corpus_ + "/queries/" + q["id"].get<std::string>() + ".png"});
  ASSERT_EQ(pp.code, 0);
  EXPECT_LE(lines(pp.out).size(), rows.size());
}

TEST_F(CliTest, QueryWritesFileAndOverlays) {
  const auto out = tmp("results.jsonl"), overlays = tmp("overlays");
  const auto r = run_cli({"query", "--index", index_, "--mode", "euclidean", "-n", "3", "--out",
                          out.string(), "--overlay-dir", overlays.string(), corpus_ + "/queries/q1_0.png"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(slurp(out)).size(), 3u);
  EXPECT_FALSE(fs::is_empty(overlays));
}

TEST_F(CliTest, QueryUsageErrors) {
  EXPECT_EQ(run_cli({"query", "--index", index_, "-n", "0", corpus_ + "/queries/q0_0.png"}).code, 2);
  EXPECT_EQ(run_cli({"query", "--index", index_}).code, 2);
  EXPECT_EQ(run_cli({"query", "--index", index_, "--mode", "cosine", corpus_ + "/queries/q0_0.png"}).code, 2);
  EXPECT_EQ(run_cli({"query", "--index", tmp("none").string(), corpus_ + "/queries/q0_0.png"}).code, 3);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, EvalHappyPathAndErrors) {
  const auto report = tmp("report.json");
  const auto r = run_cli({"eval", "--index", index_, "--gt", corpus_ + "/gt.json", "--task", "ps",
                          "--n", "10,100", "--out", report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("top-100"), std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(report));
  EXPECT_EQ(doc["task"], "ps");
  EXPECT_GE(doc["map"]["100"].get<double>(), 0.5);
  EXPECT_GE(doc["map"]["100"].get<double>(), doc["map"]["10"].get<double>());

  const auto ir = run_cli({"eval", "--index", index_, "--gt", corpus_ + "/gt.json", "--task", "ir"});
  ASSERT_EQ(ir.code, 0) << ir.err;
  EXPECT_NE(ir.out.find("top-1000"), std::string::npos);

  std::ofstream(tmp("empty_gt.json")) << R"({"queries": []})";
  EXPECT_EQ(run_cli({"eval", "--index", index_, "--gt", tmp("empty_gt.json").string()}).code, 3);
  EXPECT_EQ(run_cli({"eval", "--index", index_, "--gt", corpus_ + "/gt.json", "--task", "xx"}).code, 2);
}

TEST_F(CliTest, BenchSingleModeHasOneTimingRow) {
  const auto r = run_cli({"bench", "--index", index_, "--queries", corpus_ + "/queries", "--modes",
                          "hamming", "-n", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  int rows = 0;
  for (const auto& line : lines(r.out)) {
    if (line.rfind("hamming", 0) == 0) ++rows;
    EXPECT_NE(line.rfind("euclidean", 0), 0u);
  }
  EXPECT_EQ(rows, 1);
  EXPECT_NE(r.out.find("32.0"), std::string::npos);
  EXPECT_EQ(run_cli({"bench", "--index", index_}).code, 2);
}

TEST_F(CliTest, ConfigFileSuppliesDefaultsAndFlagsWin) {
  std::ofstream(tmp("synth.toml")) << "pages = 2\nseed = 9\nplants = 1\n";
  const auto r = run_cli({"synth", "--config", tmp("synth.toml").string(), "--out",
                          tmp("cfg_corpus").string(), "--plants", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("pages: 2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("ground-truth occurrences: 4"), std::string::npos) << r.out;
  EXPECT_EQ(run_cli({"synth", "--config", tmp("missing.toml").string(), "--out", tmp("c").string()}).code, 2);
}

}  // namespace
}  // namespace docspot::cli
