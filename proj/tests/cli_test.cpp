#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + CURVIDENT_CLI + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("curvident_cli_" + name)).string();
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(CliInvariants, Example5dTable) {
  const Result r = run("invariants --model example5d --k 1");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "tau              10\n"));
  EXPECT_TRUE(contains(r.out, "|R|^2            28\n"));
  EXPECT_TRUE(contains(r.out, "super-einstein   no\n"));
}

TEST(CliInvariants, Sl3So3Json) {
  const Result r = run("invariants --model sl3so3 --json");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "\"tau\": \"-15\""));
  EXPECT_TRUE(contains(r.out, "\"R_norm_sq\": \"75\""));
}

TEST(CliInvariants, FlatIsZero) {
  const Result r = run("invariants --model flat --dim 5 --json");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "\"tau\": \"0\""));
  EXPECT_TRUE(contains(r.out, "\"R_hat0\": \"0\""));
  EXPECT_FALSE(contains(r.out, "\"1\""));
}

TEST(CliVerify, ExitCodes) {
  EXPECT_EQ(run("verify --model example5d --k 1 --set thmA-a").code, 0);
  EXPECT_EQ(run("verify --model example5d --k 1 --set thmA-b --expect-fail thmA-b").code, 0);
  EXPECT_EQ(run("verify --model example6d --k 1 --set all").code, 0);
  EXPECT_EQ(run("verify --model example5d --k 1 --set thmA-a --expect-fail thmA-a").code, 1);
  EXPECT_EQ(run("verify --model example5d --k 1 --set lemma6").code, 2);
  EXPECT_EQ(run("verify --model example5d --set thmC").code, 2);
  EXPECT_EQ(run("verify --model torus").code, 2);
  EXPECT_EQ(run("verify --model constant --dim 4").code, 2);
  EXPECT_EQ(run("verify --model example5d --k x/").code, 2);
  EXPECT_EQ(run("verify --model file --file /nonexistent/model.json").code, 2);
  EXPECT_EQ(run("verify --bogus").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(CliVerify, CommaSeparatedSetAndR) {
  const Result r = run("verify --model nikolayevsky --alpha 1 --beta 1 --set patterson,pa5 --r 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "patterson(r=2)"));
  EXPECT_FALSE(contains(r.out, "patterson(r=1)"));
  EXPECT_TRUE(contains(r.out, "pa5"));
}

TEST(CliVerify, ThreadsDoNotChangeOutput) {
  const std::string args = "verify --model random-einstein --dim 6 --seed 3 --terms 3 --json";
  const Result one = run(args + " --threads 1");
  const Result four = run(args + " --threads 4");
  const Result env = run(args, "CURVIDENT_THREADS=3");
  EXPECT_EQ(one.code, 0);
  EXPECT_EQ(one.out, four.out);
  EXPECT_EQ(one.out, env.out);
}

TEST(CliRandomCheck, Examples) {
  const Result p = run("random-check --dim 6 --identity patterson --r 2 -n 100 --seed 7");
  EXPECT_EQ(p.code, 0);
  EXPECT_TRUE(contains(p.out, "100/100 zero"));
  const Result l = run("random-check --dim 5 --identity lemma5 -n 50 --seed 7");
  EXPECT_EQ(l.code, 0);
  EXPECT_TRUE(contains(l.out, "50/50 zero"));
  EXPECT_TRUE(contains(l.out, "einsteinized"));
  const Result b = run("random-check --dim 6 --identity thmB-b -n 20 --seed 7 --json");
  EXPECT_EQ(b.code, 1);
  EXPECT_TRUE(contains(b.out, "\"first_failing_seed\": 7"));
  EXPECT_TRUE(contains(b.out, "\"witness\""));
}

TEST(CliRandomCheck, InputErrors) {
  EXPECT_EQ(run("random-check --dim 6 --identity lemma5 -n 2").code, 2);
  EXPECT_EQ(run("random-check --dim 9 --identity patterson -n 2").code, 2);
  EXPECT_EQ(run("random-check --dim 4 --identity patterson --r 3 -n 2").code, 2);
}

TEST(CliExport, Sl3So3File) {
  const std::string path = temp_path("sl3so3.json");
  EXPECT_EQ(run("export --model sl3so3 " + path).code, 0);
  EXPECT_TRUE(contains(slurp(path), "\"tau\": \"-15\""));
  std::filesystem::remove(path);
}

TEST(CliExport, ReverifyFromExportIsIdentical) {
  const std::string path = temp_path("ex5.json");
  ASSERT_EQ(run("export --model example5d --k 2 " + path).code, 0);
  const Result again = run("verify --model file --file " + path + " --json");
  EXPECT_EQ(again.code, 0);
  EXPECT_EQ(again.out, slurp(path));
  std::filesystem::remove(path);
}

TEST(CliExport, UnwritablePath) { EXPECT_EQ(run("export --model sl3so3 /nonexistent/dir/out.json").code, 2); }
