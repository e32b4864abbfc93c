#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "cli.hpp"
#include "mrp/io.hpp"
#include "mrp/model.hpp"

using namespace mrp;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "mrp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mrp_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("estimate writes a consistent instance") {
  const fs::path dir = scratch("estimate");
  REQUIRE(run({"synth", "--seed", "5", "--out", dir.string()}).code == cli::kOk);
  const Outcome o = run({"estimate", "--prices", (dir / "prices.csv").string(), "--k", "3",
                         "--phi-multiplier", "2", "--out", dir.string()});
  REQUIRE(o.code == cli::kOk);
  const InstanceFile f = instance_from_json(read_json(dir / "instance.json"));
  CHECK(f.instance.k() == 3);
  CHECK(f.tickers.size() == f.instance.N());
  const Vector var = (f.instance.A().matrix().diagonal().array() -
                      1e-8 * f.instance.A().matrix().trace() / static_cast<double>(f.instance.N()))
                         .matrix();
  std::vector<double> v(var.data(), var.data() + var.size());
  std::sort(v.begin(), v.end());
  const double median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  CHECK(f.instance.phi() == doctest::Approx(2.0 * median / 5.0).epsilon(1e-6));
}

TEST_CASE("solve output satisfies the solution invariants") {
  const fs::path dir = scratch("solve");
  const ProblemInstance inst(SymMatrix::identity(4), SymMatrix::identity(4), 1.0, 2);
  write_json(dir / "instance.json", instance_to_json(inst, {"A", "B", "C", "D"}));
  const Outcome o = run({"solve", "--instance", (dir / "instance.json").string(), "--out", dir.string()});
  REQUIRE(o.code == cli::kOk);
  const Json j = read_json(dir / "solution.json");
  const Vector x = weights_from_solution(j);
  CHECK(x.norm() == doctest::Approx(1.0));
  CHECK((x.array() != 0.0).count() <= 2);
  CHECK(j["objective"].get<double>() == doctest::Approx(1.0));
  CHECK(j["final_objective"].get<double>() <= j["stage_one_objective"].get<double>());
  CHECK(j["support"]["tickers"].size() == 2);
}

TEST_CASE("infeasible instance exits with its own code") {
  const fs::path dir = scratch("infeasible");
  const ProblemInstance inst(SymMatrix::identity(3), SymMatrix::identity(3), 2.0, 2);
  write_json(dir / "instance.json", instance_to_json(inst, {"A", "B", "C"}));
  CHECK(run({"solve", "--instance", (dir / "instance.json").string(), "--out", dir.string()}).code ==
        cli::kInfeasible);
}

TEST_CASE("pipeline recovers the planted assets and is repeatable") {
  const fs::path dir = scratch("pipeline");
  REQUIRE(run({"synth", "--seed", "3", "--out", dir.string()}).code == cli::kOk);
  const std::string prices = (dir / "prices.csv").string();
  REQUIRE(run({"pipeline", "--prices", prices, "--k", "3", "--out", (dir / "a").string()}).code == cli::kOk);
  REQUIRE(run({"pipeline", "--prices", prices, "--k", "3", "--threads", "1", "--out",
               (dir / "b").string()})
              .code == cli::kOk);
  CHECK(slurp(dir / "a" / "solution.json") == slurp(dir / "b" / "solution.json"));
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));

  const Json planted = read_json(dir / "planted.json");
  const Json sol = read_json(dir / "a" / "solution.json");
  std::vector<std::size_t> expected = planted["planted"].get<std::vector<std::size_t>>();
  CHECK(sol["support"]["indices"].get<std::vector<std::size_t>>() == expected);
  CHECK(fs::exists(dir / "a" / "spread.csv"));
}

TEST_CASE("backtest error paths") {
  const fs::path dir = scratch("backtest");
  {
    std::ofstream f(dir / "flat.csv");
    f << "date,A,B\n2024-01-01,5,5\n2024-01-02,5,5\n2024-01-03,5,5\n2024-01-04,5,5\n";
  }
  {
    std::ofstream f(dir / "bad.csv");
    f << "date,A,B\n2024-01-01,5,5\n2024-01-02,5,oops\n";
  }
  Json sol;
  sol["x"] = std::vector<double>{0.6, 0.8};
  write_json(dir / "solution.json", sol);
  CHECK(run({"backtest", "--prices", (dir / "flat.csv").string(), "--solution",
             (dir / "solution.json").string(), "--out", dir.string()})
            .code == cli::kNoVolatility);
  CHECK(run({"backtest", "--prices", (dir / "bad.csv").string(), "--solution",
             (dir / "solution.json").string(), "--out", dir.string()})
            .code == cli::kIngest);
  CHECK(run({"estimate", "--prices", (dir / "flat.csv").string(), "--k", "1", "--out", dir.string()})
            .code == cli::kEstimation);
}

TEST_CASE("usage errors") {
  CHECK(run({"solve"}).code == cli::kFailure);
  CHECK(run({"frobnicate"}).code == cli::kFailure);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("selfcheck failure injection is reported") {
  const Outcome o = run({"selfcheck", "--inject-failure"});
  CHECK(o.code != cli::kOk);
  CHECK(o.out.find("FAIL") != std::string::npos);
}
