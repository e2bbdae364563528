#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kTool = WPPSC_TOOL_PATH;
const std::string kConfigs = WPPSC_CONFIG_DIR;

struct ToolRun {
    int status;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("wppsc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    ToolRun run(const std::string& args) const {
        const fs::path err = dir_ / "stderr.txt";
        const std::string cmd = kTool + " " + args + " 2> " + err.string() + " > /dev/null";
        const int raw = std::system(cmd.c_str());
        std::ifstream in(err);
        std::stringstream ss;
        ss << in.rdbuf();
        return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    static std::size_t data_rows(const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) ++n;
        return n - 1;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, SweepOnShippedConfig) {
    const ToolRun r = run("sweep --config " + kConfigs + "/default.json --out " + (dir_ / "a").string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(data_rows(dir_ / "a" / "sweep.csv"), 324u);
    const std::string csv = slurp(dir_ / "a" / "sweep.csv");
    EXPECT_EQ(csv.find('\r'), std::string::npos);
    EXPECT_EQ(csv.back(), '\n');
}

TEST_F(Cli, ManifestReproducesOutputs) {
    ASSERT_EQ(run("sweep -c " + kConfigs + "/default.json -o " + (dir_ / "a").string()).status, 0);
    const fs::path manifest = dir_ / "a" / "manifest.json";
    const auto m = nlohmann::json::parse(slurp(manifest));
    EXPECT_EQ(m.at("command"), "sweep");
    EXPECT_TRUE(m.contains("wppsc_version"));
    EXPECT_EQ(m.at("config").at("study").at("ops").at("v_g_ref").size(), 3u);
    ASSERT_EQ(run("sweep -j 2 -c " + manifest.string() + " -o " + (dir_ / "b").string()).status, 0);
    EXPECT_EQ(slurp(dir_ / "a" / "sweep.csv"), slurp(dir_ / "b" / "sweep.csv"));
    EXPECT_EQ(slurp(manifest), slurp(dir_ / "b" / "manifest.json"));
}

TEST_F(Cli, ScrTable) {
    const ToolRun r = run("scr -c " + kConfigs + "/default.json -o " + dir_.string());
    ASSERT_EQ(r.status, 0) << r.err;
    std::ifstream in(dir_ / "scr.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "case,scr_o,scr_sc_theory,scr_sc_sim,rel_dev");
    EXPECT_EQ(data_rows(dir_ / "scr.csv"), 3u);
}

TEST_F(Cli, NegativeScrIsConfigError) {
    const ToolRun r = run("steady -c " + kConfigs + "/weak.json --set grid.scr=-1 -o " + dir_.string());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("grid.scr"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownKeyAndMissingFile) {
    EXPECT_EQ(run("eig --set gird.scr=2 -o " + dir_.string()).status, 2);
    EXPECT_EQ(run("eig -c " + (dir_ / "missing.json").string() + " -o " + dir_.string()).status, 2);
    EXPECT_EQ(run("frobnicate").status, 2);
}

TEST_F(Cli, InfeasibleOperatingPointIsNonConvergence) {
    EXPECT_EQ(run("steady --set grid.scr=0.2 -o " + dir_.string()).status, 3);
}

TEST_F(Cli, DivergenceWritesPartialSeries) {
    const ToolRun r = run("step -c " + kConfigs + "/weak.json --set sc.enabled=false --t-end 20 -o " +
                      dir_.string());
    EXPECT_EQ(r.status, 4) << r.err;
    EXPECT_GT(data_rows(dir_ / "step.csv"), 10u);
    EXPECT_TRUE(fs::exists(dir_ / "manifest.json"));
}

TEST_F(Cli, EigWithStateMatrix) {
    const ToolRun r = run("eig --dump-a -c " + kConfigs + "/normal.json -o " + dir_.string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(data_rows(dir_ / "a_matrix.csv"), 18u);
    EXPECT_GT(data_rows(dir_ / "eigs.csv"), 5u);
}

TEST_F(Cli, SteadyAndFault) {
    ASSERT_EQ(run("steady -c " + kConfigs + "/strong.json -o " + dir_.string()).status, 0);
    EXPECT_GE(data_rows(dir_ / "steady.csv"), 18u);
    const ToolRun r = run("fault -c " + kConfigs + "/strong.json --set control.type=gfm --set events=[] "
                      "--record-every 10 -o " + dir_.string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(data_rows(dir_ / "fault.csv"), 2001u);
}
