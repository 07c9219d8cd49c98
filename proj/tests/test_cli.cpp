#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "uwit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = uwit::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("uwit_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    ::unsetenv("UWIT_SEED");
  }
  void TearDown() override {
    fs::remove_all(dir_);
    ::unsetenv("UWIT_SEED");
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& body) const {
    std::ofstream(path(name)) << body;
    return path(name);
  }

  nlohmann::json evaluate_json(const std::string& file) {
    const auto r = run({"evaluate", file, "--format", "json"});
    EXPECT_EQ(r.code, 0) << r.err;
    return nlohmann::json::parse(r.out);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EvaluateSingletDetectsEverything) {
  ASSERT_EQ(run({"gen-state", "bell", "4", "--out", path("s.json")}).code, 0);
  const auto report = evaluate_json(path("s.json"));
  EXPECT_TRUE(report["npt"].get<bool>());
  EXPECT_NEAR(report["min_pt_eigenvalue"].get<double>(), -0.5, 1e-12);
  ASSERT_EQ(report["criteria"].size(), 6u);
  for (const auto& c : report["criteria"]) EXPECT_TRUE(c["detected"].get<bool>()) << c["id"];
}

TEST_F(Cli, EvaluateMaximallyMixedDetectsNothing) {
  const auto file = write("mixed.json",
                          R"({"dims":[2,2],"re":[[0.25,0,0,0],[0,0.25,0,0],[0,0,0.25,0],[0,0,0,0.25]],)"
                          R"("im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]})");
  const auto report = evaluate_json(file);
  EXPECT_FALSE(report["npt"].get<bool>());
  for (const auto& c : report["criteria"]) EXPECT_FALSE(c["detected"].get<bool>()) << c["id"];
}

TEST_F(Cli, EvaluateCsvAndCriteriaSelection) {
  ASSERT_EQ(run({"gen-state", "werner", "0.2", "--out", path("w.json")}).code, 0);
  const auto r = run({"evaluate", path("w.json"), "--criteria", "pauli_lur,bell_tsallis", "--q", "2", "--q", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "id,value,threshold,detected");
  EXPECT_NE(r.out.find("\npauli_lur,"), std::string::npos);
  EXPECT_NE(r.out.find("\nbell_tsallis_q=2,"), std::string::npos);
  EXPECT_NE(r.out.find("\nbell_tsallis_q=4,"), std::string::npos);
  EXPECT_EQ(r.out.find("linear_witness"), std::string::npos);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
}

TEST_F(Cli, WernerBelowThresholdIsUndetectedAndPpt) {
  ASSERT_EQ(run({"gen-state", "werner", "0.2", "--out", path("w.json")}).code, 0);
  const auto report = evaluate_json(path("w.json"));
  EXPECT_FALSE(report["npt"].get<bool>());
  for (const auto& c : report["criteria"]) EXPECT_FALSE(c["detected"].get<bool>()) << c["id"];
}

TEST_F(Cli, InvalidTraceExitsThree) {
  const auto file = write("bad.json", R"({"dims":[2,1],"re":[[0.45,0],[0,0.45]],"im":[[0,0],[0,0]]})");
  const auto r = run({"evaluate", file});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("trace"), std::string::npos) << r.err;
}

TEST_F(Cli, MalformedFileExitsTwo) {
  EXPECT_EQ(run({"evaluate", write("bad.json", "{\"dims\":")}).code, 2);
  EXPECT_EQ(run({"evaluate", path("missing.json")}).code, 2);
}

TEST_F(Cli, NonQubitStatesSkipTwoQubitCriteria) {
  const auto file = write("q3.json",
                          R"({"dims":[3,1],"re":[[0.5,0,0],[0,0.5,0],[0,0,0]],"im":[[0,0,0],[0,0,0],[0,0,0]]})");
  const auto report = evaluate_json(file);
  EXPECT_TRUE(report["criteria"].empty());
  EXPECT_EQ(report["skipped"].size(), 6u);
}

TEST_F(Cli, GenStateRoundTrip) {
  const auto r = run({"gen-state", "bell", "4"});
  ASSERT_EQ(r.code, 0);
  const auto rho = uwit::parse_density_matrix(r.out);
  EXPECT_LT(uwit::hs_norm(rho.matrix() - uwit::singlet().matrix()), 1e-15);
}

TEST_F(Cli, GenStateRejectsBadParameters) {
  EXPECT_EQ(run({"gen-state", "bell-diagonal", "1", "1", "1"}).code, 2);
  EXPECT_EQ(run({"gen-state", "bell", "5"}).code, 2);
  EXPECT_EQ(run({"gen-state", "werner", "1.5"}).code, 2);
  EXPECT_EQ(run({"gen-state", "werner"}).code, 2);
  EXPECT_EQ(run({"gen-state", "teapot"}).code, 2);
  EXPECT_EQ(run({"gen-state", "noisy-singlet", "0.5", "-0.1"}).code, 2);
}

TEST_F(Cli, EveryGeneratedKindEvaluates) {
  const std::vector<std::vector<std::string>> kinds{{"bell", "1"},
                                                    {"werner", "0.7"},
                                                    {"noisy-singlet", "0.4", "0.2"},
                                                    {"bell-diagonal", "-1", "-1", "-1"},
                                                    {"bell-diagonal", "0.1", "-0.2", "0.3"},
                                                    {"random-separable", "5"}};
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    auto args = kinds[i];
    args.insert(args.begin(), "gen-state");
    args.push_back("--out");
    args.push_back(path("k" + std::to_string(i) + ".json"));
    ASSERT_EQ(run(args).code, 0) << kinds[i][0];
    EXPECT_EQ(run({"evaluate", path("k" + std::to_string(i) + ".json")}).code, 0) << kinds[i][0];
  }
}

TEST_F(Cli, SweepIsReproducible) {
  const std::vector<std::string> base{"sweep", "--samples", "200", "--p-grid", "0,0.3,1", "--seed", "5"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.csv"), "--workers", "1"});
  b.insert(b.end(), {"--out", path("b.csv"), "--workers", "3"});
  const auto ra = run(a);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(run(b).code, 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_NE(ra.out.find("chain violations=0, PPT detections=0"), std::string::npos) << ra.out;
  const auto text = slurp(path("a.csv"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_NE(text.find("\n1,1,1,1,200,5\n"), std::string::npos) << text;
}

TEST_F(Cli, SeedComesFromEnvironment) {
  const std::vector<std::string> args{"sweep", "--samples", "50", "--p-grid", "0.35"};
  ::setenv("UWIT_SEED", "9", 1);
  const auto env = run(args);
  auto flagged = args;
  flagged.insert(flagged.end(), {"--seed", "9"});
  const auto flag = run(flagged);
  ASSERT_EQ(env.code, 0);
  EXPECT_EQ(env.out, flag.out);
  EXPECT_NE(env.out.find(",50,9\n"), std::string::npos);
  flagged.back() = "10";
  EXPECT_NE(run(flagged).out.find(",50,10\n"), std::string::npos);
  ::setenv("UWIT_SEED", "nope", 1);
  EXPECT_EQ(run(args).code, 2);
}

TEST_F(Cli, GeometryRowCount) {
  const auto r = run({"geometry", "--resolution", "5", "--q", "2", "--q", "4", "--q", "15"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 375);
  EXPECT_NE(r.err.find("375 rows"), std::string::npos);
}

TEST_F(Cli, WernerThresholds) {
  const auto r = run({"werner"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "criterion,threshold");
  const auto j = run({"werner", "--format", "json"});
  const auto parsed = nlohmann::json::parse(j.out);
  for (const char* key : {"witness", "lur", "npt"}) EXPECT_NEAR(parsed[key].get<double>(), 1.0 / 3.0, 1e-6);
}

TEST_F(Cli, UnwritableOutputExitsFour) {
  EXPECT_EQ(run({"werner", "--out", path("no/such/dir/out.csv")}).code, 4);
  EXPECT_EQ(run({"gen-state", "bell", "1", "--out", path("no/such/dir/s.json")}).code, 4);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"sweep", "--bogus"}).code, 2);
  EXPECT_EQ(run({"sweep", "--p-grid", "0.1,x"}).code, 2);
  EXPECT_EQ(run({"sweep", "--p-grid", "1.5"}).code, 2);
  EXPECT_EQ(run({"geometry", "--resolution", "1"}).code, 2);
  EXPECT_EQ(run({"evaluate"}).code, 2);
  EXPECT_EQ(run({"werner", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
