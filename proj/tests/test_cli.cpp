#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dqhelmert_cli/commands.hpp"
#include "dqhelmert_cli/input.hpp"
#include "reference_cases.hpp"

namespace dqhelmert::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::string kData = DQHELMERT_DATA_DIR;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome Call(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = Run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

fs::path Scratch(const std::string& name, const std::string& contents) {
  const fs::path dir = fs::temp_directory_path() / "dqhelmert_cli_test";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << contents;
  return path;
}

json SolveJson(std::vector<std::string> extra, const std::string& file) {
  std::vector<std::string> args{"solve", "--format", "json"};
  args.insert(args.end(), extra.begin(), extra.end());
  args.push_back(file);
  const Outcome o = Call(args);
  EXPECT_EQ(o.code, 0) << o.err;
  return json::parse(o.out);
}

// Plain rotation matrix of a unit quaternion (vector part first).
Mat3 Rotation(const json& r) {
  const double x = r[0], y = r[1], z = r[2], w = r[3];
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

TEST(CsvInput, ReadsVarianceColumns) {
  std::istringstream in(
      "# comment\n\nid,x,y,z,X,Y,Z,var_src,var_dst\r\n\"A\", 1,2,3,4,5,6,0.5,0.25\n");
  const ControlPointFile f = ReadControlPoints(in, Dimension::k3D);
  ASSERT_EQ(f.problem.size(), 1);
  EXPECT_EQ(f.problem.points[0].id, "A");
  EXPECT_EQ(f.columns, WeightColumns::kVariances);
  EXPECT_EQ(f.problem.points[0].target, Vec3(4, 5, 6));
  const auto& var = std::get<weights::PerPointVariances>(f.problem.weights.kind);
  EXPECT_EQ(var.source[0], 0.5);
  EXPECT_EQ(var.target[0], 0.25);
}

TEST(CsvInput, ReadsPlanarScalarWeights) {
  std::istringstream in("id,x,y,X,Y,w\np,1,2,3,4,2.5\n");
  const ControlPointFile f = ReadControlPoints(in, Dimension::k2D);
  EXPECT_EQ(f.columns, WeightColumns::kScalar);
  EXPECT_EQ(f.problem.points[0].source, Vec3(1, 2, 0));
  EXPECT_EQ(std::get<weights::PerPointScalar>(f.problem.weights.kind).weights[0], 2.5);
}

TEST(CsvInput, MalformedRowNamesRowOne) {
  std::istringstream in("id,x,y,z,X,Y,Z\na,b,c\n");
  try {
    ReadControlPoints(in, Dimension::k3D);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 1);
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST(CsvInput, BadNumberReportsColumn) {
  std::istringstream in("id,x,y,z,X,Y,Z\n1,0,0,0,0,0,0\n2,0,0,1e,0,0,0\n");
  try {
    ReadControlPoints(in, Dimension::k3D);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2);
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 4);
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
  }
}

TEST(CsvInput, RejectsUnknownHeaderAndWeightColumns) {
  std::istringstream a("name,x,y,z,X,Y,Z\n");
  EXPECT_THROW(ReadControlPoints(a, Dimension::k3D), ParseError);
  std::istringstream b("id,x,y,z,X,Y,Z,sigma\n");
  EXPECT_THROW(ReadControlPoints(b, Dimension::k3D), ParseError);
  std::istringstream c("");
  EXPECT_THROW(ReadControlPoints(c, Dimension::k3D), ParseError);
}

TEST(CsvInput, PlanarFileInSpatialRunIsDimensionMismatch) {
  std::istringstream in("id,x,y,X,Y\n1,0,0,0,0\n");
  try {
    ReadControlPoints(in, Dimension::k3D);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("dimension mismatch"), std::string::npos);
  }
}

TEST(CsvInput, MatrixFileSizeIsChecked) {
  std::istringstream ok("1 0\n0 2\n");
  const DenseMatrix m = ReadMatrix(ok, 2);
  EXPECT_EQ(m(1, 1), 2.0);
  std::istringstream shortfall("1 0\n0\n");
  EXPECT_THROW(ReadMatrix(shortfall, 2), ParseError);
  std::istringstream excess("1 0 0 1 7\n");
  EXPECT_THROW(ReadMatrix(excess, 2), ParseError);
}

TEST(Solve, DatumCaseTextReport) {
  const Outcome o = Call({"solve", kData + "/case1.csv"});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* expected : {"1.0000056111", "-0.000277143", "0.000248913", "0.000273857",
                               "641.8395", "68.4728", "416.2155", "PASS"}) {
    EXPECT_NE(o.out.find(expected), std::string::npos) << expected << "\n" << o.out;
  }
}

TEST(Solve, SimulatedCaseResidualsAndPrecision) {
  const json r = SolveJson({}, kData + "/case2.csv");
  const auto& published = testing::Case2Residuals();
  for (size_t i = 0; i < published.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(r["residuals"][i]["source"][k].get<double>(), published[i][k], 1e-3);
      EXPECT_NEAR(r["residuals"][i]["target"][k].get<double>(), published[i][3 + k], 1e-3);
    }
  }
  const json& p = r["parameters"];
  EXPECT_NEAR(p["lambda"]["value"].get<double>(), 2.136189318, 1e-8);
  EXPECT_NEAR(p["lambda"]["sigma"].get<double>(), 0.152489951, 1e-9);
  EXPECT_NEAR(p["angles_deg"]["omega"]["sigma"].get<double>(), 4.098509955, 1e-9);
  EXPECT_NEAR(r["sigma0"].get<double>(), 10.7709, 1e-4);
  EXPECT_TRUE(r["closure"]["pass"].get<bool>());

  const Outcome text = Call({"solve", kData + "/case2.csv"});
  EXPECT_NE(text.out.find("-8.6615"), std::string::npos);
}

TEST(Solve, TextIsFormattedFromJsonValues) {
  const json r = SolveJson({}, kData + "/case2.csv");
  const Outcome text = Call({"solve", kData + "/case2.csv"});
  char buf[64];
  const json& p = r["parameters"];
  std::snprintf(buf, sizeof buf, "%.11g", p["lambda"]["value"].get<double>());
  EXPECT_NE(text.out.find(buf), std::string::npos) << buf;
  for (const char* a : {"epsilon", "psi", "omega"}) {
    std::snprintf(buf, sizeof buf, "%.9f", p["angles_deg"][a]["value"].get<double>());
    EXPECT_NE(text.out.find(buf), std::string::npos) << buf;
  }
  for (const char* t : {"x", "y", "z"}) {
    std::snprintf(buf, sizeof buf, "%.4f", p["translation"][t]["value"].get<double>());
    EXPECT_NE(text.out.find(buf), std::string::npos) << buf;
  }
}

TEST(Solve, ReportsAreReproducible) {
  const Outcome a = Call({"solve", "--format", "json", "--full-covariance", kData + "/case1.csv"});
  const Outcome b = Call({"solve", "--format", "json", "--full-covariance", kData + "/case1.csv"});
  EXPECT_EQ(a.out, b.out);
}

TEST(Solve, FullCovarianceBlocks) {
  const json r = SolveJson({"--full-covariance"}, kData + "/case1.csv");
  ASSERT_TRUE(r.contains("covariance"));
  EXPECT_EQ(r["covariance"]["quaternion"]["labels"].size(), 9u);
  EXPECT_EQ(r["covariance"]["six"]["matrix"].size(), 6u);
  const auto& c = testing::Case1SixCovariance();
  EXPECT_NEAR(r["covariance"]["six"]["matrix"][3][3].get<double>(), c[3][3], 0.005 * c[3][3]);
}

TEST(Solve, ScaledFormReportsScaledQuaternions) {
  const json r = SolveJson({"--quat-form", "scaled"}, kData + "/case2.csv");
  ASSERT_TRUE(r["parameters"].contains("scaled"));
  EXPECT_NEAR(r["parameters"]["scaled"]["s"]["value"][0].get<double>(), 51.3785932, 1e-4);
  EXPECT_TRUE(r["parameters"]["r"]["sigma"].is_null());
}

TEST(Solve, MatrixWeightsMatchColumnWeights) {
  const Problem p = testing::Case1();
  const auto& var = std::get<weights::PerPointVariances>(p.weights.kind);
  const int n = p.size();
  std::ostringstream m;
  m.precision(17);
  for (int i = 0; i < 6 * n; ++i) {
    for (int j = 0; j < 6 * n; ++j) {
      const int point = (i % (3 * n)) / 3;
      const double w = i != j ? 0.0 : 1.0 / (i < 3 * n ? var.source[point] : var.target[point]);
      m << w << (j + 1 < 6 * n ? " " : "\n");
    }
  }
  const fs::path file = Scratch("case1_weights.txt", m.str());
  const json a = SolveJson({}, kData + "/case1.csv");
  const json b = SolveJson({"--weights", file.string()}, kData + "/case1.csv");
  EXPECT_NEAR(a["parameters"]["lambda"]["value"].get<double>(),
              b["parameters"]["lambda"]["value"].get<double>(), 1e-12);
  EXPECT_NEAR(a["sigma0"].get<double>(), b["sigma0"].get<double>(), 1e-9);
}

TEST(Solve, UnitWeightsOverrideColumns) {
  const json a = SolveJson({}, kData + "/case2.csv");
  const json b = SolveJson({"--weights", "unit"}, kData + "/case2.csv");
  EXPECT_GT(std::abs(a["sigma0"].get<double>() - b["sigma0"].get<double>()), 1e-3);
}

TEST(Solve, AsymmetricModeLeavesSourceUncorrected) {
  const json r = SolveJson({"--mode", "asymmetric"}, kData + "/case2.csv");
  for (const auto& row : r["residuals"]) {
    for (const auto& x : row["source"]) EXPECT_EQ(x.get<double>(), 0.0);
  }
}

TEST(Solve, SolverFailureExitsOneWithTrace) {
  const Outcome o = Call({"solve", "--max-iter", "2", kData + "/case2.csv"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("iter 2"), std::string::npos) << o.err;
}

TEST(Solve, InputErrorsExitTwo) {
  EXPECT_EQ(Call({"solve", "/nonexistent/file.csv"}).code, 2);
  EXPECT_EQ(Call({"solve", "--method", "qa", "--quat-form", "scaled", kData + "/case1.csv"}).code, 2);
  EXPECT_EQ(Call({"solve", "--tol", "0", kData + "/case1.csv"}).code, 2);
  EXPECT_EQ(Call({"solve", "--method", "nope", kData + "/case1.csv"}).code, 2);
  EXPECT_EQ(Call({"solve", "--dim", "2", kData + "/case1.csv"}).code, 2);
  const fs::path bad = Scratch("bad.csv", "id,x,y,z,X,Y,Z\na,b,c\n");
  const Outcome o = Call({"solve", bad.string()});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("row 1"), std::string::npos);
}

TEST(Solve, OutFileReceivesReport) {
  const fs::path out = fs::temp_directory_path() / "dqhelmert_cli_test" / "report.json";
  fs::create_directories(out.parent_path());
  const Outcome o = Call({"solve", "--format", "json", "--out", out.string(), kData + "/case2.csv"});
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(out);
  EXPECT_EQ(json::parse(in)["points"].get<int>(), 4);
}

TEST(Transform, IdentityEchoesPoints) {
  const fs::path params =
      Scratch("identity.json", R"({"lambda": 1, "r": [0, 0, 0, 1], "s": [0, 0, 0, 0]})");
  const fs::path pts = Scratch("pts.csv", "id,x,y,z,extra\nA,1.5,-2,3,ignored\n");
  const Outcome o = Call({"transform", "--params", params.string(), pts.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out, "id,x,y,z,X,Y,Z\nA,1.500000,-2.000000,3.000000,1.500000,-2.000000,3.000000\n");
}

TEST(Transform, ControlPointsSatisfyClosure) {
  const Outcome solved = Call({"solve", "--format", "json", kData + "/case2.csv"});
  const fs::path params = Scratch("case2.json", solved.out);
  const json report = json::parse(solved.out);
  const Outcome o =
      Call({"transform", "--format", "json", "--params", params.string(), kData + "/case2_points.csv"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json out = json::parse(o.out);

  const json& p = report["parameters"];
  const Mat3 rot = Rotation(p["r"]["value"]);
  const double lambda = p["lambda"]["value"];
  const Problem problem = testing::Case2();
  ASSERT_EQ(out.size(), 4u);
  for (int i = 0; i < 4; ++i) {
    Vec3 e_src, e_dst;
    for (int k = 0; k < 3; ++k) {
      e_src[k] = report["residuals"][i]["source"][k];
      e_dst[k] = report["residuals"][i]["target"][k];
    }
    const Vec3 expected = problem.points[i].target - e_dst + lambda * rot * e_src;
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(out[i]["target"][k].get<double>(), expected[k], 1e-6);
    }
  }
}

TEST(Transform, PlanarPointsInSpatialRunFail) {
  const fs::path params =
      Scratch("identity.json", R"({"lambda": 1, "r": [0, 0, 0, 1], "s": [0, 0, 0, 0]})");
  const fs::path pts = Scratch("pts2.csv", "id,x,y\nA,1,2\n");
  const Outcome o = Call({"transform", "--params", params.string(), pts.string()});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("dimension mismatch"), std::string::npos);
}

TEST(Transform, RejectsNonUnitRotation) {
  const fs::path params = Scratch("bad.json", R"({"lambda": 1, "r": [0, 0, 0, 2], "s": [0, 0, 0, 0]})");
  const fs::path pts = Scratch("pts.csv", "id,x,y,z\nA,1,2,3\n");
  EXPECT_EQ(Call({"transform", "--params", params.string(), pts.string()}).code, 2);
}

TEST(Compare, DatumCaseMethodsAgree) {
  const Outcome o = Call({"compare", "--format", "json", kData + "/case1.csv"});
  ASSERT_EQ(o.code, 0) << o.err;
  const json r = json::parse(o.out);
  EXPECT_EQ(r["successes"].get<int>(), 4);
  EXPECT_LT(r["max_deviation"].get<double>(), 1e-9);
  EXPECT_TRUE(r["pass"].get<bool>());
}

TEST(Compare, SimulatedCaseLogsIterations) {
  const Outcome o = Call({"compare", kData + "/case2.csv"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("iterations"), std::string::npos);
  EXPECT_NE(o.out.find("verdict          PASS"), std::string::npos) << o.out;
}

TEST(Compare, CollinearInputAnnotatesEveryMethod) {
  const fs::path f = Scratch("collinear.csv",
                             "id,x,y,z,X,Y,Z\n1,0,0,0,1,1,1\n2,1,1,1,2,2,2\n3,2,2,2,3,3,3\n4,3,3,3,4,4,4\n");
  const Outcome o = Call({"compare", "--format", "json", f.string()});
  EXPECT_EQ(o.code, 1);
  const json r = json::parse(o.out);
  ASSERT_EQ(r["methods"].size(), 4u);
  for (const auto& m : r["methods"]) {
    EXPECT_FALSE(m["ok"].get<bool>());
    EXPECT_EQ(m["report"]["error"].get<std::string>(), "DegenerateGeometry");
  }
}

// Planted values from the generator's comment lines.
struct Planted {
  double lambda = 0.0;
  Vec3 t = Vec3::Zero();
};

Planted ReadPlanted(const std::string& csv) {
  Planted p;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::sscanf(line.c_str(), "# planted lambda %lf", &p.lambda);
    std::sscanf(line.c_str(), "# planted t %lf %lf %lf", &p.t[0], &p.t[1], &p.t[2]);
  }
  return p;
}

TEST(Generate, NoiselessRoundTrip) {
  for (int dim : {2, 3}) {
    const Outcome g = Call({"gen", "--seed", "11", "--n", "6", "--noise", "0", "--dim",
                            std::to_string(dim), "--weights", "scalar"});
    ASSERT_EQ(g.code, 0);
    const Planted planted = ReadPlanted(g.out);
    const fs::path f = Scratch("gen.csv", g.out);
    const json r = SolveJson({"--dim", std::to_string(dim)}, f.string());
    EXPECT_NEAR(r["parameters"]["lambda"]["value"].get<double>(), planted.lambda, 1e-9);
    EXPECT_NEAR(r["parameters"]["translation"]["x"]["value"].get<double>(), planted.t[0], 1e-6);
    EXPECT_NEAR(r["parameters"]["translation"]["z"]["value"].get<double>(), planted.t[2], 1e-6);
  }
}

TEST(Generate, SeedIsDeterministic) {
  EXPECT_EQ(Call({"gen", "--seed", "5"}).out, Call({"gen", "--seed", "5"}).out);
  EXPECT_NE(Call({"gen", "--seed", "5"}).out, Call({"gen", "--seed", "6"}).out);
}

}  // namespace
}  // namespace dqhelmert::cli
