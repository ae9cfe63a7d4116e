#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string errfile = "cli_stderr_" + std::to_string(++counter) + ".txt";
  const std::string cmd = std::string(RECMAX_CLI_PATH) + " " + args + " 2>" + errfile;
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t k = 0;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream ef(errfile);
  std::stringstream ss;
  ss << ef.rdbuf();
  r.err = ss.str();
  std::remove(errfile.c_str());
  return r;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(out.good());
  out << text;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("norm and dual print twelve significant digits") {
  CliResult r = run_cli("norm --model logistic:2 --x -3,-4");
  CHECK(r.code == 0);
  CHECK(r.out == "5.00000000000\n");

  r = run_cli("dual --model logistic:2 --x -3,-4");
  CHECK(r.code == 0);
  CHECK(r.out == "2.00000000000\n");

  r = run_cli("dual --model indep:d=2 --x -1,-1");
  CHECK(r.code == 0);
  CHECK(r.out == "0.00000000000\n");
}

TEST_CASE("configuration errors exit 2, estimation errors exit 3") {
  CHECK(run_cli("norm --model nosuch:2 --x -1,-1").code == 2);
  CHECK(run_cli("norm --model logistic:2").code == 2);  // missing required --x
  CHECK(run_cli("norm --model logistic:2:d=3 --x -1,-1").code == 2);  // dimension clash
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("concurrence --model logistic:2 --method nosuch").code == 2);

  CliResult r = run_cli("champion-dist --model indep:d=2 --grid -1,-1 --samples 1000");
  CHECK(r.code == 3);
  CHECK(r.err.find("zero concurrence") != std::string::npos);

  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("concurrence json is byte-identical across worker counts") {
  const std::string base =
      "concurrence --model logistic:2 --method eta --samples 20000 --seed 5";
  CliResult one = run_cli(base + " --workers 1");
  CliResult four = run_cli(base + " --workers 4");
  REQUIRE(one.code == 0);
  CHECK(one.out == four.out);

  json j = json::parse(one.out);
  CHECK(j["config"]["subcommand"] == "concurrence");
  CHECK(j["config"]["model"] == "logistic:2:d=2");  // canonical echo
  CHECK(j["config"]["seed"] == 5);
  CHECK(!j["config"].contains("workers"));
  CHECK(j["closed_form"] == 0.5);
  const double value = j["routes"]["eta"]["value"].get<double>();
  const double se = j["routes"]["eta"]["std_error"].get<double>();
  CHECK(std::abs(value - 0.5) <= 5 * se);
  CHECK(j["routes"]["eta"]["n_samples"] == 20000);
  CHECK(!j["routes"].contains("generator"));
}

TEST_CASE("copula-only concurrence runs the empirical route alone") {
  CliResult r = run_cli(
      "concurrence --copula gumbel:2:d=2 --n 100 --reps 200 --seed 2 --workers 2");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["config"]["copula"] == "gumbel:2:d=2");
  CHECK(j["routes"].contains("empirical"));
  CHECK(!j["routes"].contains("eta"));
  CHECK(!j.contains("closed_form"));
  CHECK(j["routes"]["empirical"]["p_n"]["value"].is_number());
  CHECK(j["routes"]["empirical"]["n_pi_bar"]["value"].is_number());
}

TEST_CASE("flags can come from a file") {
  write_file("cli_args.txt", "# demo arguments\n--model logistic:2\n\n--x -3,-4\n");
  CliResult r = run_cli("norm --args-from cli_args.txt");
  CHECK(r.code == 0);
  CHECK(r.out == "5.00000000000\n");
  r = run_cli("norm --args-from=cli_args.txt");
  CHECK(r.out == "5.00000000000\n");
  std::remove("cli_args.txt");
  CHECK(run_cli("norm --args-from no_such_args.txt").code == 2);
}

TEST_CASE("sampling is seed-deterministic and bounded") {
  const std::string cmd = "sample --what eta --model logistic:2:d=2 --n 50 --seed 3";
  CliResult a = run_cli(cmd);
  CliResult b = run_cli(cmd);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto lines = lines_of(a.out);
  REQUIRE(lines.size() == 51);
  CHECK(lines[0] == "x1,x2");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto comma = lines[i].find(',');
    REQUIRE(comma != std::string::npos);
    CHECK(std::stod(lines[i].substr(0, comma)) < 0.0);
    CHECK(std::stod(lines[i].substr(comma + 1)) < 0.0);
  }

  CliResult c = run_cli(
      "sample --what copula --copula gumbel:2:d=2 --n 10 --seed 4 --out cli_sample.csv");
  CHECK(c.code == 0);
  CHECK(c.out.empty());
  std::ifstream f("cli_sample.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "x1,x2");
  f.close();
  std::remove("cli_sample.csv");

  CHECK(run_cli("sample --what nosuch --model logistic:2 --n 5").code == 2);
}

TEST_CASE("records scan reports the summary for a data file") {
  write_file("cli_rows.csv", "x1,x2\n0,0\n1,-1\n2,1\n");
  CliResult r = run_cli("records scan --input cli_rows.csv");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["config"]["input"] == "cli_rows.csv");
  CHECK(j["summary"]["simple_record_times"] == json::array({1, 2, 3}));
  CHECK(j["summary"]["complete_record_times"] == json::array({1, 3}));
  CHECK(j["summary"]["champion_index"] == 3);

  // a monotone margin transform cannot change record times
  CliResult pit = run_cli("records scan --input cli_rows.csv --margins rank");
  REQUIRE(pit.code == 0);
  json jp = json::parse(pit.out);
  CHECK(jp["summary"]["simple_record_times"] == j["summary"]["simple_record_times"]);
  CHECK(jp["config"]["margins"] == "rank");

  // stdin spelling
  CliResult piped = run_cli("records scan --input - < cli_rows.csv");
  REQUIRE(piped.code == 0);
  CHECK(json::parse(piped.out)["summary"]["champion_index"] == 3);
  std::remove("cli_rows.csv");

  write_file("cli_bad.csv", "x1,x2\n1,oops\n");
  CliResult bad = run_cli("records scan --input cli_bad.csv");
  CHECK(bad.code == 3);
  CHECK(bad.err.find("line 2") != std::string::npos);
  std::remove("cli_bad.csv");

  CHECK(run_cli("records scan --input no_such_rows.csv").code == 3);
}

TEST_CASE("records simulate scans its own draws") {
  CliResult r = run_cli("records simulate --copula comonotone:d=2 --n 50 --seed 7");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["config"]["copula"] == "comonotone:d=2");
  CHECK(j["config"]["n"] == 50);
  CHECK(j["summary"]["n"] == 50);
  CHECK(j["summary"]["simple_count"].get<int>() >= 1);
  // all coordinates move together, so the overall maximum dominates
  CHECK(j["summary"]["champion_index"].is_number());
  CHECK(j["summary"]["simple_record_times"] == j["summary"]["complete_record_times"]);
}

TEST_CASE("growth emits csv by default and json on request") {
  const std::string base =
      "records growth --copula product:d=2 --n 20 --reps 50 --seed 1 --checkpoints 1,10,20";
  CliResult r = run_cli(base);
  REQUIRE(r.code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] ==
        "k,simple_mean,simple_se,complete_mean,complete_se,"
        "simple_ratio,simple_ratio_se,complete_ratio,complete_ratio_se");
  CHECK(lines[1].substr(0, 4) == "1,1,");
  CHECK(lines[1].find("nan") != std::string::npos);  // no ratio at k = 1

  CliResult j = run_cli(base + " --format json");
  REQUIRE(j.code == 0);
  json g = json::parse(j.out);
  CHECK(g["config"]["checkpoints"] == json::array({1, 10, 20}));
  REQUIRE(g["rows"].size() == 3);
  CHECK(g["rows"][0]["simple_ratio"].is_null());
  CHECK(g["rows"][2]["k"] == 20);
}

TEST_CASE("record-times reports both routes and the tail") {
  CliResult r = run_cli(
      "record-times --copula comonotone:d=2 --samples 20000 --cap 10000 --seed 9");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["config"]["cap"] == 10000);
  CHECK(j["divergence_flag"] == true);  // survival 1/k has no mean
  CHECK(!j["integral_route"].is_null());
  CHECK(j["direct_route"]["value"].is_number());
  CHECK(j["tail"].is_array());

  CliResult csv = run_cli(
      "record-times --copula product:d=2 --samples 5000 --cap 2000 --seed 9 --format csv");
  REQUIRE(csv.code == 0);
  auto lines = lines_of(csv.out);
  CHECK(lines[0] == "k,survival,se,count");
  CHECK(lines.size() > 100);  // every integer k up to 100, then coarser
}

TEST_CASE("distribution grids print one csv row per point") {
  CliResult r = run_cli(
      "champion-dist --model mo:0.4:d=2 --grid '-0.5,-1;-1,-1' --samples 20000 --seed 6");
  REQUIRE(r.code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "x1,x2,value,se");
  {
    std::istringstream row(lines[1]);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == 4);
    CHECK(cells[0] == -0.5);
    const double target = 1.0 - std::exp((0.4 + 2 * 0.6) * -0.5);
    CHECK(std::abs(cells[2] - target) <= 5 * cells[3] + 1e-9);
  }

  CliResult j = run_cli(
      "simple-dist --model indep:d=2 --grid '-1,-1' --samples 20000 --seed 6 --format json");
  REQUIRE(j.code == 0);
  json sd = json::parse(j.out);
  CHECK(sd["config"]["model"] == "indep:d=2");
  REQUIRE(sd["points"].size() == 1);
  CHECK(sd["points"][0]["x"] == json::array({-1.0, -1.0}));
  const double value = sd["points"][0]["estimate"]["value"].get<double>();
  const double se = sd["points"][0]["estimate"]["std_error"].get<double>();
  CHECK(std::abs(value - std::exp(-1.0)) <= 5 * se);

  CliResult emp = run_cli(
      "simple-dist --copula product:d=2 --grid '-1,-1' --n 100 --reps 200 --seed 6");
  CHECK(emp.code == 0);
  CHECK(lines_of(emp.out).size() == 2);

  CHECK(run_cli("simple-dist --copula product:d=2 --grid '-1,-1' --n 2 --reps 1").code == 2);
  CHECK(run_cli("champion-dist --model mo:0.4:d=2 --grid '-1,-1;-1,-1,-1'").code == 2);
}

TEST_CASE("chi-bar covers simulated and file-based inputs") {
  CliResult r = run_cli("chi-bar --copula product:d=2 --u 0.5,0.9 --samples 20000 --seed 5");
  REQUIRE(r.code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "u,chi_bar,se,exceedances,low_count");
  CHECK(lines[1].substr(0, 4) == "0.5,");

  // synthetic file with identical columns: strong tail dependence
  std::ostringstream data;
  data << "x1,x2\n";
  unsigned state = 12345;
  for (int i = 0; i < 500; ++i) {
    state = state * 1103515245u + 12345u;
    const double v = static_cast<double>(state % 100000u) / 100000.0;
    data << v << "," << v << "\n";
  }
  write_file("cli_chibar.csv", data.str());
  CliResult f = run_cli("chi-bar --input cli_chibar.csv --u 0.5 --format json");
  REQUIRE(f.code == 0);
  json j = json::parse(f.out);
  CHECK(j["config"]["margins"] == "rank");
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["rows"][0]["chi_bar"].get<double>() == doctest::Approx(1.0).epsilon(0.25));
  std::remove("cli_chibar.csv");

  CHECK(run_cli("chi-bar --copula product:d=2 --input x.csv --u 0.5").code == 2);
  CHECK(run_cli("chi-bar --copula product:d=2 --u 1.5").code == 2);
}
