#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(INDECIDE_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("indecide_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const fs::path golden(GOLDEN_DIR);

}  // namespace

TEST(Cli, AccuracyGolden) {
    const auto d = scratch("acc");
    const auto r = run("calibrate --mode accuracy --alpha 0.1 --input " + (golden / "accuracy_five_point.csv").string() +
                       " --out-dir " + d.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(slurp(d / "report.txt").find("rule.tau = 0.80000000000000004"), std::string::npos);
    EXPECT_NE(slurp(d / "report.txt").find("gamma_hat = 0.40000000000000002"), std::string::npos);
    EXPECT_EQ(slurp(d / "trace.csv"), slurp(golden / "accuracy_five_point_trace.csv"));
    EXPECT_TRUE(fs::exists(d / "manifest.txt"));
    EXPECT_TRUE(fs::exists(d / "rule.txt"));
}

TEST(Cli, NpGolden) {
    const auto d = scratch("np");
    const auto r = run("calibrate --mode np --alpha1 0.3333333333333333 --alpha2 0.3333333333333333 --input " +
                       (golden / "np_six_point.csv").string() + " --out-dir " + d.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(slurp(d / "trace.csv"), slurp(golden / "np_six_point_trace.csv"));
}

TEST(Cli, ExitCodes) {
    const auto d = scratch("codes");
    put(d / "bad.csv", "scr,label\n0.5,1\n");
    auto r = run("calibrate --mode accuracy --alpha 0.1 --input " + (d / "bad.csv").string() + " --out-dir " +
                 (d / "o1").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("score"), std::string::npos) << r.out;

    put(d / "badrow.csv", "score,label\n0.5,1\n0.7,x\n");
    r = run("calibrate --mode accuracy --alpha 0.1 --input " + (d / "badrow.csv").string() + " --out-dir " +
            (d / "o2").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;

    put(d / "flip.csv", "score,label\n0.9,2\n0.2,1\n0.8,2\n0.1,1\n");
    r = run("calibrate --mode accuracy --alpha 0.01 --input " + (d / "flip.csv").string() + " --out-dir " +
            (d / "o3").string());
    EXPECT_EQ(r.code, 2) << r.out;
    EXPECT_NE(slurp(d / "o3" / "report.txt").find("feasible = false"), std::string::npos);

    EXPECT_EQ(run("calibrate --mode bogus --input " + (d / "flip.csv").string()).code, 1);
    EXPECT_EQ(run("nosuchcommand").code, 1);
}

TEST(Cli, ApplyRules) {
    const auto d = scratch("apply");
    put(d / "acc_rule.txt", "format_version = 1\nkind = accuracy\ntau = 0.8\n");
    put(d / "np_rule.txt", "format_version = 1\nkind = np\ntau1 = 0.2\ntau2 = 0.6\n");
    put(d / "s1.csv", "score\n0.9\n0.7\n0.15\n");
    put(d / "s2.csv", "score\n0.1\n0.4\n0.9\n");
    put(d / "empty.csv", "score\n");

    auto r = run("apply --rule " + (d / "acc_rule.txt").string() + " --input " + (d / "s1.csv").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("1,1\n2,abstain\n3,2\n"), std::string::npos) << r.out;

    r = run("apply --rule " + (d / "np_rule.txt").string() + " --input " + (d / "s2.csv").string() + " --output " +
            (d / "out.csv").string());
    ASSERT_EQ(r.code, 0) << r.out;
    const std::string out = slurp(d / "out.csv");
    EXPECT_NE(out.find("1,2\n2,abstain\n3,1\n"), std::string::npos) << out;
    EXPECT_NE(out.find("# abstained 1 of 3"), std::string::npos) << out;

    r = run("apply --rule " + (d / "acc_rule.txt").string() + " --input " + (d / "empty.csv").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("# abstained 0 of 0"), std::string::npos) << r.out;
}

TEST(Cli, CalibrateThenApplyRoundTrip) {
    const auto d = scratch("roundtrip");
    ASSERT_EQ(run("calibrate --mode np --alpha1 0.3333333333333333 --alpha2 0.3333333333333333 --input " +
                  (golden / "np_six_point.csv").string() + " --out-dir " + d.string())
                  .code,
              0);
    const auto r = run("apply --rule " + (d / "rule.txt").string() + " --input " + (golden / "np_six_point.csv").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("# abstained 0 of 6"), std::string::npos) << r.out;
}

TEST(Cli, ExperimentDeterministicAcrossWorkers) {
    const auto d = scratch("exp");
    put(d / "cfg.json", R"({"n_train": 200, "n_cal": 200, "n_test": 200, "reps": 5, "delta_grid": [0.5, 1.5], "scorer": "lda"})");
    const std::string base = "experiment np-sweep --config " + (d / "cfg.json").string() + " --seed 7";
    ASSERT_EQ(run(base + " --workers 1 --out-dir " + (d / "a").string()).code, 0);
    ASSERT_EQ(run(base + " --workers 3 --out-dir " + (d / "b").string()).code, 0);
    int compared = 0;
    for (const auto& e : fs::directory_iterator(d / "a")) {
        if (e.path().extension() != ".csv" && e.path().filename() != "manifest.txt") continue;
        EXPECT_EQ(slurp(e.path()), slurp(d / "b" / e.path().filename())) << e.path();
        ++compared;
    }
    EXPECT_GE(compared, 3);

    put(d / "unknown.json", R"({"reps": 5, "color": "red"})");
    const auto r = run("experiment np-sweep --config " + (d / "unknown.json").string() + " --out-dir " + (d / "c").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("color"), std::string::npos);
}

TEST(Cli, OracleQueries) {
    auto r = run("oracle --delta 1 --gamma 0");
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("0.1586552539314"), std::string::npos) << r.out;
    r = run("oracle --delta 1 --target-risk 0.01");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(run("oracle --delta -1 --gamma 0").code, 1);
}

TEST(Cli, FitAndPredict) {
    const auto d = scratch("fit");
    put(d / "train.csv", "f_1,label\n-2,2\n-1.5,2\n-0.5,1\n0.4,2\n1,1\n2,1\n");
    auto r = run("fit --model lda --input " + (d / "train.csv").string() + " --output " + (d / "m.txt").string());
    ASSERT_EQ(r.code, 0) << r.out;
    put(d / "x.csv", "f_1\n-3\n0\n3\n");
    r = run("predict --model " + (d / "m.txt").string() + " --input " + (d / "x.csv").string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("score"), std::string::npos) << r.out;
}
