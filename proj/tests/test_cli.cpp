#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "plap/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run plap_run(std::vector<std::string> args) {
  args.insert(args.begin(), "plap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.status = plap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("plap_cli_" + std::to_string(std::rand()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name, std::ios::binary) << text;
    return file(name);
  }
};

plap::CsvTable table_of(const std::string& text) {
  std::istringstream in(text);
  return plap::read_csv_table(in);
}

}  // namespace

TEST_CASE("cli: ptrig table") {
  const auto r = plap_run({"ptrig", "--p", "3", "--samples", "100"});
  REQUIRE(r.status == 0);
  const auto t = table_of(r.out);
  CHECK(t.rows.size() == 100);
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(std::abs(t.number(i, "residual")) < 1e-9);
  CHECK(r.out.rfind("# plap ptrig\n# config: ", 0) == 0);
}

TEST_CASE("cli: eigs match the finite-difference oracle") {
  TempDir dir;
  const auto q = dir.write("q.json", R"({"kind":"trig","a0":0,"a":[1],"b":[]})");
  const auto out = dir.file("spectrum.csv");
  const auto r = plap_run({"eigs", "--p", "2", "--bc", "dirichlet", "--q", q, "--n", "1..10", "-o", out});
  REQUIRE(r.status == 0);
  CHECK(r.out.empty());
  const auto t = table_of(slurp(out));
  REQUIRE(t.rows.size() == 10);
  const auto pot = plap::Potential::trig(0.0, {1.0}, {});
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const int n = t.integer(i, "n");
    const double ref = oracle::fd_dirichlet_richardson(pot, 4000, n);
    CHECK(t.number(i, "lambda") == doctest::Approx(ref).epsilon(1e-5));
  }
}

TEST_CASE("cli: identical configurations give identical bytes") {
  TempDir dir;
  const auto q = dir.write("q.json", R"({"kind":"piecewise","breaks":[0,0.5,1],"values":[3,-1]})");
  const std::vector<std::string> args{"periodic-eigs", "--p", "2.5", "--q", q, "--n", "2,4"};
  auto a = args, b = args, c = args;
  a.insert(a.end(), {"-o", dir.file("a.csv")});
  b.insert(b.end(), {"-o", dir.file("b.csv")});
  REQUIRE(plap_run(a).status == 0);
  REQUIRE(plap_run(b).status == 0);
  CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));

  c[2] = "3";
  c.insert(c.end(), {"-o", dir.file("c.csv")});
  REQUIRE(plap_run(c).status == 0);
  auto hash_line = [](const std::string& text) {
    const auto at = text.find("# config_hash: ");
    return text.substr(at, text.find('\n', at) - at);
  };
  CHECK(hash_line(slurp(dir.file("a.csv"))) != hash_line(slurp(dir.file("c.csv"))));

  // the hash also covers the input bytes
  dir.write("q.json", R"({"kind":"piecewise","breaks":[0,0.5,1],"values":[3,-1.5]})");
  b.back() = dir.file("d.csv");
  REQUIRE(plap_run(b).status == 0);
  CHECK(hash_line(slurp(dir.file("a.csv"))) != hash_line(slurp(dir.file("d.csv"))));
}

TEST_CASE("cli: eigs, nodes, reconstruct round trip on the free problem") {
  TempDir dir;
  for (const char* p : {"2", "3"}) {
    const auto spectrum = dir.file("spectrum.csv"), nodes = dir.file("nodes.csv"), fn = dir.file("fn.csv");
    REQUIRE(plap_run({"eigs", "--p", p, "--bc", "dirichlet", "--n", "1..12", "-o", spectrum}).status == 0);
    REQUIRE(plap_run({"nodes", "--p", p, "--bc", "dirichlet", "--spectrum", spectrum, "-o", nodes}).status == 0);
    REQUIRE(plap_run({"reconstruct", "--p", p, "--variant", "dirichlet", "--nodal", nodes, "--mean", "0", "--grid",
                      "256", "-o", fn})
                .status == 0);
    const auto t = table_of(slurp(fn));
    CHECK(t.columns == std::vector<std::string>{"x", "F_n", "variant", "n", "wrap"});
    CHECK(t.rows.size() == 12 * 256);
    double worst = 0.0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) worst = std::max(worst, std::abs(t.number(i, "F_n")));
    CHECK(worst < 1e-6);

    // periodic chain, including points on the wrap-around interval
    REQUIRE(plap_run({"periodic-eigs", "--p", p, "--n", "2,4,6", "-o", spectrum}).status == 0);
    REQUIRE(plap_run({"nodes", "--p", p, "--bc", "periodic", "--spectrum", spectrum, "-o", nodes}).status == 0);
    REQUIRE(plap_run({"reconstruct", "--p", p, "--variant", "periodic", "--nodal", nodes, "-o", fn}).status == 0);
    const auto tp = table_of(slurp(fn));
    worst = 0.0;
    for (std::size_t i = 0; i < tp.rows.size(); ++i) worst = std::max(worst, std::abs(tp.number(i, "F_n")));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("cli: json mirror") {
  const auto r = plap_run({"asymptotics", "--p", "2", "--n", "4..12", "--output-format", "json"});
  REQUIRE(r.status == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["command"] == "asymptotics");
  CHECK(doc["config"]["p"] == 2.0);
  CHECK(doc["columns"][0] == "n");
  CHECK(doc["rows"].size() == 9);
  CHECK(std::abs(doc["summary"]["mean_estimate"].get<double>()) < 1e-6);
  CHECK(doc["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("cli: rlcheck and ambarzumyan") {
  TempDir dir;
  const auto g = dir.write("g.json", R"({"kind":"piecewise","breaks":[0,0.3183,1],"values":[1,0]})");
  const auto r = plap_run({"rlcheck", "--p", "2", "--g", g, "--n", "5,50"});
  REQUIRE(r.status == 0);
  const auto t = table_of(r.out);
  CHECK(t.number(1, "abs_I_n") < t.number(0, "abs_I_n"));

  const auto a = plap_run({"ambarzumyan", "--p", "3", "--bc", "antiperiodic"});
  REQUIRE(a.status == 0);
  CHECK(a.out.find("# conclusion: consistent_with_zero") != std::string::npos);

  const auto c = dir.write("c.json", R"({"kind":"piecewise","breaks":[0,1],"values":[2]})");
  const auto v = plap_run({"ambarzumyan", "--p", "2", "--q", c});
  REQUIRE(v.status == 0);
  CHECK(v.out.find("# conclusion: violates_hypotheses") != std::string::npos);

  // measured spectrum from a file
  const auto spectrum = dir.file("free.csv");
  REQUIRE(plap_run({"periodic-eigs", "--p", "2", "-o", spectrum}).status == 0);
  const auto m = plap_run({"ambarzumyan", "--p", "2", "--spectrum", spectrum});
  REQUIRE(m.status == 0);
  CHECK(m.out.find("# conclusion: consistent_with_zero") != std::string::npos);
}

TEST_CASE("cli: exit statuses and diagnostics") {
  auto single_line = [](const Run& r) { return !r.err.empty() && r.err.find('\n') == r.err.size() - 1; };

  auto r = plap_run({"frobnicate"});
  CHECK(r.status == 2);
  CHECK(single_line(r));
  CHECK(r.err.find("frobnicate") != std::string::npos);

  CHECK(plap_run({}).status == 2);
  CHECK(plap_run({"eigs", "--p", "1"}).status == 2);
  CHECK(plap_run({"eigs", "--p", "2", "--n", "3..1"}).status == 2);
  CHECK(plap_run({"eigs", "--p", "2", "--bc", "periodic"}).status == 2);
  CHECK(plap_run({"eigs", "--p", "2", "--tol", "1e-20"}).status == 2);
  CHECK(plap_run({"eigs", "--q", "/nonexistent/q.json"}).status == 2);
  CHECK(plap_run({"periodic-eigs", "--n", "3"}).status == 2);
  CHECK(plap_run({"ptrig", "--output-format", "xml"}).status == 2);
  r = plap_run({"reconstruct", "--variant", "dirichlet"});
  CHECK(r.status == 2);
  CHECK(single_line(r));

  // the Neumann ground state of q = 0 is constant: no zeros to report
  r = plap_run({"nodes", "--bc", "neumann", "--n", "1"});
  CHECK(r.status == 1);
  CHECK(single_line(r));

  CHECK(plap_run({"ptrig", "--help"}).status == 0);
}

TEST_CASE("cli: PLAP_TOL sets the default tolerance") {
  ::setenv("PLAP_TOL", "1e-8", 1);
  const auto r = plap_run({"eigs", "--n", "1..2", "--output-format", "json"});
  const auto bad = plap_run({"eigs"});
  ::setenv("PLAP_TOL", "junk", 1);
  const auto junk = plap_run({"eigs"});
  ::unsetenv("PLAP_TOL");
  REQUIRE(r.status == 0);
  CHECK(nlohmann::json::parse(r.out)["config"]["tol"] == 1e-8);
  CHECK(bad.status == 0);
  CHECK(junk.status == 2);
  const auto flag = plap_run({"eigs", "--n", "1", "--tol", "1e-9", "--output-format", "json"});
  CHECK(nlohmann::json::parse(flag.out)["config"]["tol"] == 1e-9);
}
