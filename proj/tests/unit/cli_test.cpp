#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace fs = std::filesystem;
using testing_support::fixture_path;
using stylesplit::io::read_file;

namespace {

struct Output {
  int status = -1;
  std::string out, err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("stylesplit_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Output run(const std::string& args) const {
    const auto err_path = dir_ / "stderr.txt";
    const std::string cmd = std::string(STYLESPLIT_CLI) + " " + args + " 2>" + err_path.string();
    Output o;
    FILE* pipe = popen(cmd.c_str(), "r");
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) o.out.append(buf, got);
    const int raw = pclose(pipe);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    o.err = read_file(err_path.string());
    return o;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kGreek = fixture_path("greek_two_part.txt");
const std::string kGreekTruth = fixture_path("greek_two_part_truth.csv");
const std::string kGreekFlags = " --n 2 --fragment 900 --step 90 --method ncd --seed 5";

}  // namespace

TEST_F(Cli, MissingInputFileIsUsageErrorWithJson) {
  const auto o = run("attribute " + path("nope.txt"));
  EXPECT_EQ(o.status, 2);
  const auto j = nlohmann::json::parse(o.err);
  EXPECT_EQ(j["error"]["kind"], "input");
  EXPECT_FALSE(j["error"]["message"].get<std::string>().empty());
}

TEST_F(Cli, BadFlagIsUsageError) {
  const auto o = run("attribute --n two " + kGreek);
  EXPECT_EQ(o.status, 2);
  EXPECT_EQ(nlohmann::json::parse(o.err)["error"]["kind"], "usage");
}

TEST_F(Cli, StepMustDivideFragment) {
  const auto o = run("attribute --fragment 900 --step 70 " + kGreek);
  EXPECT_EQ(o.status, 2);
  EXPECT_EQ(nlohmann::json::parse(o.err)["error"]["kind"], "parameter");
}

TEST_F(Cli, UnsupportedShapeReported) {
  const auto o = run("attribute --n 3 --fragment 900 --step 90 " + kGreek);
  EXPECT_EQ(o.status, 2);
  EXPECT_EQ(nlohmann::json::parse(o.err)["error"]["kind"], "unsupported");
}

TEST_F(Cli, AttributeWritesSegmentsOfStepWidth) {
  const auto o = run("attribute" + kGreekFlags + " " + kGreek);
  ASSERT_EQ(o.status, 0) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_EQ(j["segment_width"], 90);
  EXPECT_EQ(j["n"], 2);
  for (const auto& s : j["segments"]) {
    EXPECT_LE(s["end_word"].get<int>() - s["start_word"].get<int>() + 1, 90);
  }
}

TEST_F(Cli, EvaluationReportsBoundAndBaseline) {
  const auto o = run("attribute" + kGreekFlags + " --truth " + kGreekTruth + " -o " + path("r.json") + " " + kGreek);
  ASSERT_EQ(o.status, 0) << o.err;
  const auto e = nlohmann::json::parse(o.out)["evaluation"];
  EXPECT_GT(e["agreement"].get<double>(), 0.5);
  EXPECT_NEAR(e["upper_bound"].get<double>(), (3840.0 - 450.0) / 3840.0, 1e-12);
  EXPECT_EQ(e["random_baseline"].get<double>(), 0.5);
}

TEST_F(Cli, EnvironmentOverridesDefaults) {
  // the default step of 100 does not divide 930
  EXPECT_EQ(run("attribute --method ncd --fragment 930 " + kGreek).status, 2);
  setenv("STYLESPLIT_STEP", "93", 1);
  const auto o = run("attribute --method ncd --fragment 930 " + kGreek);
  unsetenv("STYLESPLIT_STEP");
  ASSERT_EQ(o.status, 0) << o.err;
  EXPECT_EQ(nlohmann::json::parse(o.out)["segment_width"], 93);
}

TEST_F(Cli, FragmentStageWritesTenSets) {
  const auto o = run("stage fragment" + kGreekFlags + " --workdir " + path("w") + " " + kGreek);
  ASSERT_EQ(o.status, 0) << o.err;
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(path("w"))) {
    files += e.path().filename().string().rfind("fragments_", 0) == 0;
  }
  EXPECT_EQ(files, 10u);
  const auto m = nlohmann::json::parse(read_file(path("w/manifest.json")));
  EXPECT_EQ(m["words"], 3840);
  EXPECT_EQ(m["offsets"].size(), 10u);
}

TEST_F(Cli, StageChainEqualsSingleShot) {
  for (const std::string method : {"ncd", "stylo"}) {
    const std::string flags = " --n 2 --fragment 900 --step 90 --seed 5 --method " + method;
    const std::string w = " --workdir " + path("chain_" + method);
    ASSERT_EQ(run("stage fragment" + flags + w + " " + kGreek).status, 0);
    ASSERT_EQ(run(std::string("stage ") + (method == "ncd" ? "distances" : "features") + flags + w).status, 0);
    ASSERT_EQ(run("stage cluster" + flags + w).status, 0);
    ASSERT_EQ(run("stage align" + flags + w).status, 0);
    for (const std::string format : {"json", "svg"}) {
      const auto chained = run("stage average" + flags + w + " --format " + format);
      const auto single = run("attribute" + flags + " --format " + format + " " + kGreek);
      ASSERT_EQ(chained.status, 0) << chained.err;
      ASSERT_EQ(single.status, 0) << single.err;
      EXPECT_EQ(chained.out, single.out) << method << " " << format;
    }
  }
}

TEST_F(Cli, AlignStageSwapOnIdenticalSpans) {
  const std::string w = " --workdir " + path("s");
  ASSERT_EQ(run("stage fragment --n 2 --fragment 1920 --step 1920" + w + " " + kGreek).status, 0);
  // two clusterings of the same fragment set
  auto m = nlohmann::json::parse(read_file(path("s/manifest.json")));
  m["offsets"] = {0, 0};
  stylesplit::io::write_file(path("s/manifest.json"), m.dump());
  stylesplit::io::write_file(path("s/fragments_01.json"), read_file(path("s/fragments_00.json")));
  stylesplit::io::write_file(path("s/clustering_00.csv"), "start_word,end_word,label\n1,1920,0\n1921,3840,1\n");
  stylesplit::io::write_file(path("s/clustering_01.csv"), "start_word,end_word,label\n1,1920,1\n1921,3840,0\n");
  const auto o = run("stage align" + w + " -o " + path("audit.json"));
  ASSERT_EQ(o.status, 0) << o.err;
  const auto audit = nlohmann::json::parse(read_file(path("audit.json")));
  EXPECT_EQ(audit["permutations"][1], nlohmann::json({1, 0}));
  EXPECT_EQ(read_file(path("s/aligned_01.csv")), read_file(path("s/clustering_00.csv")));
}

TEST_F(Cli, SchemaMismatchNamesField) {
  const std::string w = " --workdir " + path("v");
  ASSERT_EQ(run("stage fragment" + kGreekFlags + w + " " + kGreek).status, 0);
  auto m = nlohmann::json::parse(read_file(path("v/manifest.json")));
  m.erase("fragment");
  stylesplit::io::write_file(path("v/manifest.json"), m.dump());
  const auto o = run("stage distances" + w);
  EXPECT_EQ(o.status, 2);
  const auto err = nlohmann::json::parse(o.err)["error"];
  EXPECT_EQ(err["kind"], "validation");
  EXPECT_NE(err["message"].get<std::string>().find("fragment"), std::string::npos);
}

TEST_F(Cli, RenderIsDeterministic) {
  ASSERT_EQ(run("attribute" + kGreekFlags + " -o " + path("r.json") + " " + kGreek).status, 0);
  const auto a = run("render " + path("r.json") + " --truth " + kGreekTruth);
  const auto b = run("render " + path("r.json") + " --truth " + kGreekTruth);
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("<svg", 0), 0u);
}
