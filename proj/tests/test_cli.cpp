#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int code = -1;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mlcc_test_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs mlcc inside the scratch dir; stderr is folded into out.
  CmdResult mlcc(const std::string& args) const {
    std::string cmd = "cd '" + dir_.string() + "' && '" MLCC_PATH "' " + args + " 2>&1";
    CmdResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void spit(const std::string& name, const std::string& text) const {
    std::ofstream out(dir_ / name, std::ios::binary);
    out << text;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EqPipeline) {
  ASSERT_EQ(mlcc("fn make EQ --n 4 -o eq4.fn").code, 0);
  ASSERT_EQ(mlcc("proto build eq --n 4 -o eq4.nm").code, 0);
  auto v = mlcc("proto verify eq4.nm eq4.fn");
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "correct=true pairs=256 width=4\n");
  ASSERT_EQ(mlcc("convert nm-to-gh eq4.nm -o eq4.gh --check eq4.fn").code, 0);
  auto s = mlcc("gh simulate eq4.gh --x 0101 --y 0101");
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(s.out, "spill=Bob output=1\n");
  EXPECT_EQ(mlcc("gh simulate eq4.gh --x 0101 --y 0100").out, "spill=Alice output=0\n");
  auto b = mlcc("bounds report eq4.fn");
  EXPECT_EQ(b.code, 0);
  EXPECT_NE(b.out.find("dOneWay=4"), std::string::npos);
}

TEST_F(Cli, FunctionEval) {
  ASSERT_EQ(mlcc("fn make IP --n 3 -o ip3.fn").code, 0);
  EXPECT_EQ(mlcc("fn eval ip3.fn --x 110 --y 011").out, "output=1\n");
  EXPECT_EQ(mlcc("fn eval ip3.fn --x 110 --y 111").out, "output=0\n");
}

TEST_F(Cli, EveryConversionVerifies) {
  ASSERT_EQ(mlcc("fn make DISJ --n 3 -o f").code, 0);
  ASSERT_EQ(mlcc("proto build disj --n 3 -o p.nm").code, 0);
  const char* chain[] = {
      "convert nm-to-gbbp p.nm -o p.gbbp --check f", "convert gbbp-to-nm p.gbbp -o q.nm --check f",
      "convert gbbp-to-bbp p.gbbp -o p.bbp --check f", "convert nm-to-gh p.nm -o p.gh --check f",
      "convert gh-to-nm p.gh -o r.nm --check f",      "convert nm-to-s p.nm -o p.s --check f",
      "convert s-to-nm p.s -o s.nm --check f",
  };
  for (const char* cmd : chain) {
    auto r = mlcc(cmd);
    EXPECT_EQ(r.code, 0) << cmd << ": " << r.out;
  }
  for (const char* p : {"q.nm", "r.nm", "s.nm", "p.s", "p.gbbp", "p.bbp", "p.gh"}) {
    EXPECT_EQ(mlcc(std::string("proto verify ") + p + " f").code, 0) << p;
  }
  ASSERT_EQ(mlcc("proto build mto-disj --n 3 -o d.mto").code, 0);
  EXPECT_EQ(mlcc("proto verify d.mto f").code, 0);
  EXPECT_EQ(mlcc("convert mto-to-nm d.mto -o d.nm --check f").code, 0);
}

TEST_F(Cli, RunWithTrace) {
  ASSERT_EQ(mlcc("proto build parity --n 2 -o p.nm").code, 0);
  auto r = mlcc("proto run p.nm --x 10 --y 11 --trace");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("Alice "), std::string::npos);
  EXPECT_NE(r.out.find("output=1"), std::string::npos);
}

TEST_F(Cli, OverlayConversion) {
  ASSERT_EQ(mlcc("fn make EQ --n 1 -o eq1.fn").code, 0);
  spit("good.ov", "count=3 na=1 nb=1\nR 1 rows=0 cols=0\nR 1 rows=1 cols=1\nR 0 rows=0,1 cols=0,1\n");
  spit("bad.ov", "count=3 na=1 nb=1\nR 0 rows=0,1 cols=0,1\nR 1 rows=0 cols=0\nR 1 rows=1 cols=1\n");
  auto ok = mlcc("convert overlay-to-mto good.ov -o eq1.mto --check eq1.fn");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(mlcc("proto verify eq1.mto eq1.fn").code, 0);
  auto bad = mlcc("convert overlay-to-mto bad.ov -o x.mto --check eq1.fn");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("first-hit"), std::string::npos);
  EXPECT_NE(bad.out.find("witness x="), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "x.mto"));
  EXPECT_EQ(mlcc("convert overlay-to-mto good.ov -o y.mto").code, 2);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(mlcc("").code, 2);
  EXPECT_EQ(mlcc("proto frobnicate").code, 2);
  EXPECT_EQ(mlcc("proto build nosuch --n 2 -o x").code, 2);
  EXPECT_EQ(mlcc("convert nm-to-magic a -o b").code, 2);
  auto scale = mlcc("fn make EQ --n 13 -o x");
  EXPECT_EQ(scale.code, 3);
  EXPECT_EQ(scale.out.find('\n'), scale.out.size() - 1);
  EXPECT_EQ(mlcc("fn eval missing.fn --x 0 --y 0").code, 1);
  ASSERT_EQ(mlcc("fn make EQ --n 2 -o eq.fn").code, 0);
  ASSERT_EQ(mlcc("fn make PARITY --n 2 -o par.fn").code, 0);
  ASSERT_EQ(mlcc("proto build eq --n 2 -o eq.nm").code, 0);
  auto wrong = mlcc("proto verify eq.nm par.fn");
  EXPECT_EQ(wrong.code, 1);
  EXPECT_NE(wrong.out.find("correct=false"), std::string::npos);
  EXPECT_NE(wrong.out.find("witness x="), std::string::npos);
  EXPECT_EQ(mlcc("fn eval eq.fn --x 012 --y 00").code, 1);
}

TEST_F(Cli, ByteDeterministic) {
  std::string first;
  for (int i = 0; i < 3; ++i) {
    ASSERT_EQ(mlcc("proto build ip --n 3 -o ip.nm").code, 0);
    ASSERT_EQ(mlcc("--jobs " + std::to_string(i + 1) + " convert nm-to-gh ip.nm -o ip.gh").code, 0);
    ASSERT_EQ(mlcc("convert nm-to-gbbp ip.nm -o ip.gbbp").code, 0);
    std::string all = slurp("ip.nm") + slurp("ip.gh") + slurp("ip.gbbp");
    if (i == 0) {
      first = all;
    } else {
      EXPECT_EQ(all, first);
    }
  }
}

TEST_F(Cli, PipelineDemos) {
  for (std::string args : {"eq --n 2", "ip --n 2", "disj --n 3", "parity --n 3", "isa --n 4", "qdisj --n 2"}) {
    auto r = mlcc("pipeline demo " + args);
    EXPECT_EQ(r.code, 0) << args << "\n" << r.out;
    EXPECT_NE(r.out.find("realized"), std::string::npos);
    EXPECT_EQ(r.out.find(" NO"), std::string::npos) << r.out;
  }
  EXPECT_NE(mlcc("pipeline demo isa --n 4").out.find("slack_factor="), std::string::npos);
}
