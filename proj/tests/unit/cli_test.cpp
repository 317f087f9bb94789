#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dioph::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Cli, CountHandExample) {
  const auto r = run({"count", "--manifold", "parabola", "--q", "5", "--psi", "table:{5:1/5}", "--theta", "0,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"A\": 2"), std::string::npos);
  EXPECT_NE(r.out.find("\"borderline\": 4"), std::string::npos);
  const auto r2 = run({"count", "--manifold", "parabola", "--q", "2", "--psi", "table:{2:2/5}", "--format", "csv"});
  ASSERT_EQ(r2.code, 0);
  EXPECT_EQ(lines(r2.out)[1].substr(0, 8), "2,0.4,2,");
}

TEST(Cli, UsageErrorsNameTheToken) {
  const auto r = run({"count", "--q", "5", "--psi", "pow:1/2:zz"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("zz"), std::string::npos);
  const auto r2 = run({"count", "--q", "5", "--psi", "pow:1/2", "--manifold", "torus"});
  EXPECT_EQ(r2.code, 2);
  EXPECT_NE(r2.err.find("torus"), std::string::npos);
  EXPECT_EQ(run({"count", "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, ScanRowsAndSchema) {
  const auto r = run({"scan", "--manifold", "parabola", "--qmin", "2", "--qmax", "100", "--psi", "powlog:1/3:2/3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 100u);
  EXPECT_EQ(rows[0], dioph::cli::kScanHeader);
  EXPECT_EQ(rows[1].substr(0, 2), "2,");
  EXPECT_EQ(rows[99].substr(0, 4), "100,");
}

TEST(Cli, ScanLacunaryAndEmptySupport) {
  const auto r = run({"scan", "--psi", "pow:1", "--support", "lacunary:2", "--qmin", "2", "--qmax", "1024"});
  ASSERT_EQ(r.code, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 11u);
  std::int64_t expected = 2;
  for (size_t i = 1; i < rows.size(); ++i, expected *= 2) {
    EXPECT_EQ(rows[i].substr(0, rows[i].find(',')), std::to_string(expected));
  }
  const auto empty = run({"scan", "--psi", "table:{5:1/5}", "--qmin", "10", "--qmax", "20"});
  EXPECT_EQ(empty.code, 0);
  EXPECT_EQ(lines(empty.out).size(), 1u);
}

TEST(Cli, ScanIsByteIdenticalAcrossThreads) {
  std::string reference;
  for (const char* t : {"1", "3", "8"}) {
    const auto r = run({"scan", "--manifold", "paraboloid(2)", "--psi", "pow:1/2", "--qmax", "40", "--no-timing",
                        "--theta", "1/3,1/2,1/5", "--threads", t});
    ASSERT_EQ(r.code, 0);
    if (reference.empty()) reference = r.out;
    EXPECT_EQ(r.out, reference) << t;
  }
}

TEST(Cli, BoundsCsvAndExitCode) {
  const auto full = run({"bounds", "--manifold", "parabola", "--q", "64", "--psi", "table:{64:1/4}", "--C1", "2"});
  const auto rows = lines(full.out);
  ASSERT_EQ(rows[0], "u,A_u,B_u,B_star,chain_ok");
  EXPECT_EQ(rows.size(), 34u);
  EXPECT_EQ(full.code, 1);
  const auto half = run({"bounds", "--manifold", "parabola", "--q", "64", "--psi", "table:{64:1/4}", "--C1", "2",
                         "--window", "half"});
  EXPECT_EQ(half.code, 0) << half.err;
  EXPECT_EQ(half.out.find("false"), std::string::npos);
  const auto two = run({"bounds", "--manifold", "paraboloid(2)", "--q", "128", "--psi", "const:1/8", "--window",
                        "half"});
  EXPECT_EQ(two.code, 0) << two.err;
  EXPECT_EQ(lines(two.out)[1].substr(0, 4), "0:0,");
}

TEST(Cli, SeriesClassification) {
  const auto r = run({"series", "--d", "1", "--m", "1", "--tau", "0.5", "--s", "1", "--qmax", "100000"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"classification\": \"diverges\""), std::string::npos);
  EXPECT_NE(r.out.find("\"critical_exponents\""), std::string::npos);
  const auto t = run({"series", "--psi", "table:{2:1/4}", "--s", "1", "--qmax", "10"});
  ASSERT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("\"classification\": null"), std::string::npos);
}

TEST(Cli, CoverCsv) {
  const auto r = run({"cover", "--manifold", "parabola", "--q", "10", "--psi", "const:1/5", "--s", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  EXPECT_EQ(rows[0], "q,a1,b1,diameter,s_power");
  EXPECT_EQ(rows.size(), 9u);
}

TEST(Cli, ManifoldFromJson) {
  const std::string path = ::testing::TempDir() + "saddle.json";
  {
    std::ofstream f(path);
    f << R"({"name": "saddle", "d": 2, "coordinates": [[{"coeff": "1", "exp": [2, 0]}, {"coeff": "-1", "exp": [0, 2]}]]})";
  }
  const auto m = dioph::cli::load_manifold(path);
  EXPECT_EQ(m.name(), "saddle");
  EXPECT_EQ(m.d(), 2);
  const auto r = run({"count", "--manifold", path, "--q", "20", "--psi", "const:1/10"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::remove(path.c_str());
}

TEST(Cli, ConfigFile) {
  const std::string path = ::testing::TempDir() + "count.toml";
  {
    std::ofstream f(path);
    f << "[count]\nq = 5\npsi = \"table:{5:1/5}\"\nformat = \"csv\"\nno-timing = true\n";
  }
  const auto r = run({"--config", path, "count"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out)[1], "5,0.2,2,1,6,6,2,4,0");
  std::remove(path.c_str());
}

TEST(Cli, VerifyFast) {
  const auto r = run({"verify", "--suite", "fast", "--seed", "42"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, Presets) {
  const auto r = run({"presets"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("veronese_counterexample"), std::string::npos);
}
