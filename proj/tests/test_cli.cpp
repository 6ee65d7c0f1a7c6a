#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "relumax/constructions.hpp"

using namespace relumax;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "relumax");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("relumax_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write_net(const std::string& name, const ReluNetwork& net) const {
    save_text(path(name), serialize(net));
    return path(name);
  }
  fs::path dir_;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_F(Cli, BoundsTable) {
  const auto r = run({"bounds", "--d", "256", "--k", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("6553.6"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("8127"), std::string::npos);
  const auto j = run({"--format", "json", "bounds", "--d", "9", "--k", "3", "--r", "3", "--delta", "1/38"});
  ASSERT_EQ(j.code, 0) << j.err;
  const auto parsed = Json::parse(j.out);
  EXPECT_EQ(parsed["thm3"], "7");
  EXPECT_EQ(parsed["turan"]["exact"], "81/4");
  EXPECT_EQ(parsed["corollary"]["exact"], "3159/152");
  EXPECT_TRUE(parsed["guaranteed_clique_size"].is_null());
}

TEST_F(Cli, BuildVerifySample) {
  const auto b = run({"build", "tournament", "--d", "8", "-o", path("t8.json")});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(network_from_json(Json::parse(slurp(path("t8.json")))), tournament_max(8));
  const auto v = run({"--seed", "1", "verify", "max", "--net", path("t8.json"), "--mode", "sample", "--samples", "10000"});
  EXPECT_EQ(v.code, 0) << v.err;
  EXPECT_NE(v.out.find("verdict: equal"), std::string::npos);
}

TEST_F(Cli, BuildToStdoutAndRandom) {
  const auto m = run({"build", "max2"});
  ASSERT_EQ(m.code, 0);
  EXPECT_EQ(deserialize(m.out), max2_gadget());
  const auto r1 = run({"--seed", "7", "build", "random", "--dims", "3,4,2"});
  const auto r2 = run({"--seed", "7", "build", "random", "--dims", "3,4,2"});
  ASSERT_EQ(r1.code, 0) << r1.err;
  EXPECT_EQ(r1.out, r2.out);
  EXPECT_EQ(deserialize(r1.out).depth(), 3u);
  EXPECT_EQ(run({"build", "random", "--dims", "3,x"}).code, 3);
  EXPECT_EQ(run({"build", "random", "--dims", "3"}).code, 3);
}

TEST_F(Cli, VerifyExitCodes) {
  const auto t = write_net("t3.json", tournament_max(3));
  const auto zero = write_net("z.json", ReluNetwork(3, {AffineMap(3, {{0, 0, 0}}, {0})}, AffineMap(1, {{0}}, {0})));
  EXPECT_EQ(run({"verify", "max", "--net", t}).code, 0);
  const auto ce = run({"verify", "max", "--net", zero});
  EXPECT_EQ(ce.code, 2);
  EXPECT_NE(ce.out.find("counterexample"), std::string::npos);
  EXPECT_EQ(run({"--budget", "1", "verify", "max", "--net", t}).code, 4);
  EXPECT_EQ(run({"verify", "eq", "--a", t, "--b", t, "--box", "-1,1"}).code, 0);
  EXPECT_EQ(run({"verify", "eq", "--a", t, "--b", zero}).code, 2);
  const auto js = run({"--format", "json", "verify", "max", "--net", zero});
  const auto parsed = Json::parse(js.out);
  EXPECT_EQ(parsed["verdict"], "counterexample");
}

TEST_F(Cli, Errors) {
  EXPECT_EQ(run({"bounds", "--d", "10", "--k", "3", "--bogus"}).code, 3);
  EXPECT_EQ(run({}).code, 3);
  EXPECT_EQ(run({"verify", "max", "--net", path("missing.json")}).code, 3);
  save_text(path("bad.json"), "{\"input_dim\": 2}");
  EXPECT_EQ(run({"verify", "max", "--net", path("bad.json")}).code, 3);
  EXPECT_EQ(run({"--format", "xml", "build", "max2"}).code, 3);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(Cli, ReduceExitCodesAndDeterminism) {
  const auto shallow = write_net("g.json", max2_gadget());
  const auto r = run({"reduce", "--net", shallow});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("precondition failed"), std::string::npos);
  EXPECT_NE(r.err.find("depth"), std::string::npos);

  const auto t = write_net("t6.json", tournament_max(6));
  const auto a = run({"--format", "json", "--seed", "3", "reduce", "--net", t});
  const auto b = run({"--format", "json", "--seed", "3", "reduce", "--net", t});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(Json::parse(a.out)["outcome"], "collapsed");
  const auto text = run({"reduce", "--net", t, "-o", path("rep.json")});
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("outcome: collapsed"), std::string::npos);
  EXPECT_EQ(Json::parse(slurp(path("rep.json")))["outcome"], "collapsed");
}

TEST_F(Cli, GraphAndSimplify) {
  const AffineMap h(5, {{0, 0, 1, -1, 0}, {0, -1, 0, 1, 0}, {1, 0, 0, 0, -1}, {0, 0, 0, 1, -1}}, Vec(4));
  const auto net = write_net("f3.json", ReluNetwork(5, {h}, AffineMap(4, {{1, 1, 1, 1}}, {0})));
  const auto g = run({"graph", "--net", net, "--dot", path("g.dot")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_NE(g.out.find("edges: 6"), std::string::npos) << g.out;
  EXPECT_NE(g.out.find("maximum clique: {1,2,3}"), std::string::npos);
  EXPECT_NE(slurp(path("g.dot")).find("x1 -- x2;"), std::string::npos);

  const auto s = run({"simplify", "--net", write_net("g2.json", max2_gadget())});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("x1 - x2 = 0"), std::string::npos);
  EXPECT_EQ(run({"simplify", "--net", write_net("t4.json", tournament_max(4))}).code, 3);
}

TEST(CliBinary, ByteIdenticalAcrossProcesses) {
  const std::string cmd = std::string(RELUMAX_CLI) + " --format json --seed 5 bounds --d 70000 --k 4 --r 3";
  auto capture = [&] {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    pclose(p);
    return out;
  };
  const auto a = capture();
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, capture());
}
