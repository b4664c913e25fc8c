#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "clawkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = clawkit::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "clawkit_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("classify reports the structural invariants") {
  auto r = cli({"classify", "--f", "1", "--g", "u*p1"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["k_vanishes"] == true);
  CHECK(j["n_vanishes"] == true);
  CHECK(j["normal_form"] == "u_xxx + g(x,u,p)");

  auto k = json::parse(cli({"classify", "--g", "p2^2"}).out);
  CHECK(k["k_vanishes"] == false);
  CHECK(k["n_vanishes"].is_null());

  auto p = json::parse(cli({"classify", "--f", "p1^(-3)", "--g", "-3*p1^(-4)*p2^2"}).out);
  CHECK(p["n_vanishes"] == true);

  auto text = cli({"--format", "text", "classify", "--g", "u*p1"});
  CHECK(text.out.find("K vanishes: yes") != std::string::npos);
  auto csv = cli({"--format", "csv", "classify", "--g", "u*p1"});
  CHECK(csv.out.rfind("key,value\n", 0) == 0);
  CHECK(csv.out.find("k_vanishes,true") != std::string::npos);
}

TEST_CASE("type reproduces the KdV counts") {
  auto r = cli({"--format", "text", "type", "--g", "u*p1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("(3,1,1)\n", 0) == 0);
  auto j = json::parse(cli({"type", "--g", "u*p1", "--weight5"}).out);
  CHECK(j["type"] == json::array({3, 1, 1, 1}));
  auto csv = cli({"--format", "csv", "type", "--g", "u^2*p1/2"});
  CHECK(csv.out == "order,weight,new_laws\n0,-1,2\n1,1,2\n2,3,1\n");
}

TEST_CASE("search with every ansatz flag") {
  auto r = cli({"search", "--g", "u*p1", "--order", "1", "--deg-x", "1", "--deg-t", "1", "--deg-u", "4", "--closure",
                "0", "--basis-cap", "5000", "--full-basis", "--route", "byparts", "--jet-cap", "12"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["new_laws"] == 1);
  CHECK(j["ansatz"]["d_u"] == 4);
  CHECK(j["ansatz"]["d_x"] == 1);

  auto text = cli({"--format", "text", "search", "--g", "u*p1", "--order", "0"});
  CHECK(text.out.find("3 new law(s)") != std::string::npos);
  auto csv = cli({"--format", "csv", "search", "--g", "u*p1", "--order", "0"});
  CHECK(csv.out.rfind("order,weight,density,flux\n", 0) == 0);

  // Explicit atoms and time atoms.
  auto at = json::parse(cli({"search", "--g", "exp(u)*p1 - p1^3/8", "--atom", "exp(u/2)", "--atom", "exp(-u/2)",
                             "--time-atom", "exp(t)", "--order", "0"})
                            .out);
  CHECK(at["ansatz"]["atoms"].size() == 2);
  CHECK(at["ansatz"]["time_atoms"] == json::array({"exp(t)"}));
}

TEST_CASE("parameters must be bound before searching") {
  auto free = cli({"search", "--g", "u*p1 + a*p1", "--param", "a"});
  CHECK(free.code == 1);
  auto bound = cli({"search", "--g", "u*p1 + a*p1", "--bind", "a=1/2"});
  CHECK(bound.code == 0);
  auto bad = cli({"search", "--g", "u*p1", "--bind", "a"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("name=value") != std::string::npos);
  auto classify = cli({"classify", "--g", "u*p1 + a*p1", "--param", "a"});
  CHECK(classify.code == 0);
}

TEST_CASE("probe") {
  auto r = cli({"--format", "csv", "probe", "--g", "u*p1", "--max-order", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.out == "order,weight,new_laws\n0,-1,3\n1,1,1\n2,3,1\n");
  auto t = cli({"--format", "text", "probe", "--g", "p2^2", "--max-order", "1"});
  CHECK(t.out.find("weight -1: 0") != std::string::npos);
  auto j = json::parse(cli({"probe", "--g", "u*p1", "--max-order", "0"}).out);
  CHECK(j["counts"][0]["new_laws"] == 3);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(cli({}).code == 1);
  CHECK(cli({"classify", "--g", "u*"}).code == 1);
  CHECK(cli({"classify"}).code == 1);
  CHECK(cli({"classify", "--g", "u*p1", "--bogus"}).code == 1);
  CHECK(cli({"--format", "xml", "classify", "--g", "u"}).code == 1);
  CHECK(cli({"classify", "--f", "t", "--g", "u"}).code == 1);
  CHECK(cli({"search", "--g", "u*p1", "--route", "other"}).code == 1);
  CHECK(cli({"verify", "--g", "x*p1", "--density", "u", "--points", "64"}).code == 1);
  CHECK(cli({"verify", "--g", "u*p1", "--density", "u", "--points", "64", "--dt", "1"}).code == 1);
  auto help = cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("curveflow") != std::string::npos);
}

TEST_CASE("jet cap from the environment") {
  // Weight-5 search needs jet order 12 on the Euler route.
  setenv("CLAWKIT_JET_CAP", "8", 1);
  auto capped = cli({"search", "--g", "u*p1", "--order", "3"});
  unsetenv("CLAWKIT_JET_CAP");
  CHECK(capped.code == 2);
  auto flag = cli({"search", "--g", "u*p1", "--order", "3", "--jet-cap", "8"});
  CHECK(flag.code == 2);
}

TEST_CASE("verify monitors searched and explicit densities") {
  auto r = cli({"verify", "--g", "u*p1", "--length", "80", "--points", "256", "--dt", "0.002", "--time", "0.5",
                "--record-every", "50", "--laws-order", "1", "--tolerance", "1e-6", "--floor", "1e-8"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(j["series"].size() == 3);
  CHECK(j["times"].size() == 6);
  CHECK(j["warnings"].size() == 1);

  auto csv = cli({"--format", "csv", "verify", "--g", "u*p1", "--u0", "3*sech(x/2)^2", "--points", "128", "--dt",
                  "0.01", "--time", "0.1", "--record-every", "5", "--density", "u", "--density", "u^2"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("time,I_1,I_2\n", 0) == 0);

  auto fail = cli({"--format", "text", "verify", "--g", "u*p1", "--points", "32", "--dt", "0.05", "--time", "1",
                   "--density", "u^2", "--tolerance", "1e-300"});
  CHECK(fail.code == 2);
  CHECK(fail.out.find("FAIL") != std::string::npos);

  auto sponge = json::parse(cli({"verify", "--g", "u*p1 + x*p1/10", "--allow-x", "--length", "60", "--points", "128",
                                 "--dt", "0.005", "--time", "0.2", "--u0", "sech(x)^2", "--density", "u",
                                 "--tolerance", "1"})
                                .out);
  CHECK(sponge["indicative"] == true);
}

TEST_CASE("curveflow outputs") {
  auto states = scratch("states.csv"), moments = scratch("moments.csv"), svg = scratch("curve.svg");
  auto r = cli({"curveflow", "--x", "(1+0.1*cos(3*theta))*cos(theta)", "--y", "(1+0.1*cos(3*theta))*sin(theta)",
                "--samples", "128", "--dt", "0.001", "--time", "0.05", "--record-every", "10", "--states",
                states.string(), "--moments", moments.string(), "--svg", svg.string(), "--fit", "--tolerance",
                "1e-4"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["states"] == 6);
  CHECK(j["pass"] == true);
  CHECK(j["self_similar_fit"]["residual"].get<double>() > 0.0);
  CHECK(slurp(states).rfind("t,j,x,y\n", 0) == 0);
  CHECK(slurp(moments).rfind("t,L,A,Mx,My,M2\n", 0) == 0);
  CHECK(slurp(svg).find("<svg") == 0);

  // Sample CSV input and the normal-only mode.
  auto input = scratch("curve_in.csv");
  {
    std::ofstream f(input);
    f << "x,y\n";
    for (int j = 0; j < 64; ++j) {
      double th = 2 * 3.14159265358979323846 * j / 64;
      f << 2 * std::cos(th) << "," << std::sin(th) << "\n";
    }
  }
  auto n = cli({"--format", "csv", "curveflow", "--input", input.string(), "--no-redistribute", "--dt", "0.001",
                "--time", "0.01"});
  REQUIRE(n.code == 0);
  CHECK(n.out.rfind("t,L,A,Mx,My,M2\n", 0) == 0);
  auto t = cli({"--format", "text", "curveflow", "--samples", "64", "--time", "0.01"});
  CHECK(t.out.find("PASS") != std::string::npos);
}

TEST_CASE("catalog list and run") {
  auto list = json::parse(cli({"catalog", "list"}).out);
  CHECK(list.size() >= 20);
  auto text = cli({"--format", "text", "catalog", "list"});
  CHECK(text.out.find("kdv-family/r2=0,r1=0") != std::string::npos);
  auto csv = cli({"--format", "csv", "catalog", "list"});
  CHECK(csv.out.rfind("id,f,g,expected\n", 0) == 0);

  auto run = cli({"catalog", "run", "--only", "kdv-family/r2=0,r1=0", "--only", "mkdv-plus/r1=0,r0=0", "--weight5",
                  "--progress"});
  REQUIRE(run.code == 0);
  auto j = json::parse(run.out);
  CHECK(j["all_pass"] == true);
  CHECK(j["results"].size() == 2);
  CHECK(j["results"][0]["observed"] == json::array({3, 1, 1, 1}));
  CHECK(!j["results"][0].contains("seconds"));
  CHECK(run.err.find("running kdv-family") != std::string::npos);

  auto timed = cli({"--format", "text", "catalog", "run", "--only", "kdv-family/r2=0,r1=0", "--timings"});
  CHECK(timed.out.find(" s\n") != std::string::npos);

  auto none = cli({"catalog", "run", "--only", "no-such-family"});
  CHECK(none.code == 1);
}

TEST_CASE("catalog regression mismatch exits with 2 and a diff") {
  auto file = scratch("catalog.json");
  {
    std::ofstream f(file);
    f << R"({"families": [{"id": "kdv-wrong", "f": "1", "g": "u*p1", "params": [],
      "expected": {"n_minus1": 2, "n1": 1, "n3": 1}, "notes": "deliberately wrong",
      "instances": [{"label": "plain", "bindings": {}}]}]})";
  }
  auto r = cli({"--format", "csv", "catalog", "--file", file.string(), "run"});
  CHECK(r.code == 2);
  CHECK(r.out.find("n_minus1: expected 2, got 3") != std::string::npos);
}

TEST_CASE("config files are overridden by flags") {
  auto cfg = scratch("run.json");
  {
    std::ofstream f(cfg);
    f << R"({"format": "text", "search": {"g": "u*p1", "order": 1, "deg-x": 2}})";
  }
  auto a = cli({"--config", cfg.string(), "search"});
  REQUIRE(a.code == 0);
  CHECK(a.out.find("order 1: 1 new law(s)") != std::string::npos);
  auto b = cli({"--config", cfg.string(), "search", "--order", "0"});
  CHECK(b.out.find("order 0: 3 new law(s)") != std::string::npos);
  auto c = cli({"--config", cfg.string(), "--format", "json", "search"});
  CHECK(json::parse(c.out)["order"] == 1);

  auto bad = scratch("bad.json");
  {
    std::ofstream f(bad);
    f << "{not json";
  }
  CHECK(cli({"--config", bad.string(), "search", "--g", "u"}).code == 1);
}

TEST_CASE("output file and determinism") {
  auto out1 = scratch("out1.json"), out2 = scratch("out2.json");
  std::vector<std::string> args{"type", "--g", "u^2*p1/2"};
  auto a = args, b = args;
  a.insert(a.begin(), {"-o", out1.string()});
  b.insert(b.begin(), {"--output", out2.string()});
  REQUIRE(cli(a).code == 0);
  REQUIRE(cli(b).code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(!slurp(out1).empty());
  CHECK(cli({"catalog", "run", "--only", "mkdv-plus/r1=0,r0=0"}).out == cli({"catalog", "run", "--only", "mkdv-plus/r1=0,r0=0"}).out);
  CHECK(cli({"verify", "--g", "u*p1", "--points", "64", "--dt", "0.01", "--time", "0.1", "--density", "u^2"}).out ==
        cli({"verify", "--g", "u*p1", "--points", "64", "--dt", "0.01", "--time", "0.1", "--density", "u^2"}).out);
}
