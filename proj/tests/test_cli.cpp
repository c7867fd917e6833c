// End-to-end tests of the command-line tool: spawns the real binary, parses
// the JSON envelopes, and checks payloads against the library.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include <droplet/arith.hpp>
#include <droplet/evolution.hpp>
#include <droplet/resonance.hpp>
#include <droplet/version.hpp>

using json = nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(DROPLET_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json envelope_of(const std::string& args) {
  const auto r = run_cli(args);
  REQUIRE(r.exit_code == 0);
  return json::parse(r.out);
}

}  // namespace

TEST_CASE("envelope carries command, version, parameters and payload") {
  const auto env = envelope_of("resonances --n-max 100");
  CHECK(env.at("command") == "resonances");
  CHECK(env.at("version") == droplet::version_string);
  CHECK(env.at("parameters").at("n_max") == 100);
  CHECK(env.contains("wall_time_ms"));
  const auto& payload = env.at("payload");
  REQUIRE(payload.at("count") == 2);
  CHECK(payload.at("triples")[0] ==
        json({{"n1", 5}, {"n2", 5}, {"n3", 8}, {"squarefree", 35}}));
  CHECK(payload.at("triples")[1] ==
        json({{"n1", 10}, {"n2", 10}, {"n3", 16}, {"squarefree", 30}}));
}

TEST_CASE("payloads are byte-identical across runs and thread counts") {
  const auto a = envelope_of("--threads 1 smalldivisor --n-max 40");
  const auto b = envelope_of("--threads 1 smalldivisor --n-max 40");
  const auto c = envelope_of("--threads 3 smalldivisor --n-max 40");
  CHECK(a.at("payload").dump() == b.at("payload").dump());
  CHECK(a.at("parameters").dump() == b.at("parameters").dump());
  CHECK(a.at("payload").dump() == c.at("payload").dump());
}

TEST_CASE("kernel command lists the integer solutions") {
  const auto p = envelope_of("kernel --a 15 --b 1 --n-max 100").at("payload");
  REQUIRE(p.at("count") == 1);
  CHECK(p.at("solutions")[0] == json({{"n", 6}, {"j", 4}}));
  const auto q = envelope_of("kernel --a 1 --b 15 --n-max 100").at("payload");
  REQUIRE(q.at("count") == 1);
  CHECK(q.at("solutions")[0] == json({{"n", 6}, {"j", 60}}));
}

TEST_CASE("single-curve elliptic report carries points and kernels") {
  const auto p = envelope_of("elliptic --c 2 --x-bound 1000").at("payload");
  CHECK(p.at("caveat").get<std::string>().find("complete only up to") != std::string::npos);
  const auto& row = p.at("row");
  CHECK(row.at("point_count") == 8);
  CHECK(row.at("unique_kernel") == false);
  CHECK_FALSE(row.contains("n0"));  // no factorization pins a single point
  REQUIRE(row.at("points").size() == 8);
  CHECK(row.at("points")[1] == json({{"x", -2}, {"y", 4}}));
  // Both nontrivial splits of c = 2 admit three points each.
  for (const auto& f : row.at("factorizations")) CHECK(f.at("admissible").size() == 3);
}

TEST_CASE("elliptic table reports uniqueness and the least kernel mode") {
  const auto p = envelope_of("elliptic --c-max 15 --x-bound 100000").at("payload");
  REQUIRE(p.at("rows").size() == 15);
  const auto& last = p.at("rows")[14];
  CHECK(last.at("c") == 15);
  CHECK(last.at("unique_kernel") == true);
  CHECK(last.at("n0") == 6);
  CHECK(last.at("frequency") == json({{"multiple", 4}, {"radicand", 15}}));
  CHECK(p.at("min_n0") == json({{"n0", 6}, {"c", 15}}));
}

TEST_CASE("small-divisor evaluation and scan") {
  const auto single = envelope_of("smalldivisor --n1 2 --n2 2 --n3 3 --pattern mm").at("payload");
  CHECK(single.at("exact_zero") == false);
  CHECK(single.at("value").get<double>() == Catch::Approx(-0.179629).margin(5e-7));
  const auto zero = envelope_of("smalldivisor --n1 5 --n2 5 --n3 8 --pattern mm").at("payload");
  CHECK(zero.at("exact_zero") == true);
  const auto scan = envelope_of("--threads 1 smalldivisor --n-max 50").at("payload");
  CHECK(scan.at("min_weighted").get<double>() ==
        Catch::Approx(25.201205240833573).epsilon(1e-12));
  CHECK(scan.at("argmin") == json({{"n1", 2}, {"n2", 2}, {"n3", 3}}));
  CHECK(scan.at("triples_scanned") == 60023);
}

TEST_CASE("counting command matches the library") {
  const auto p = envelope_of("counting --A 41/2").at("payload");
  CHECK(p.at("count").get<std::uint64_t>() ==
        droplet::resonance::count_pairs(droplet::arith::BigRat(41, 2), true));
  const auto q = envelope_of("counting --A 30 --no-ratio-window").at("payload");
  CHECK(q.at("count").get<std::uint64_t>() ==
        droplet::resonance::count_pairs(droplet::arith::BigRat(30), false));
}

TEST_CASE("normal-form coefficients through the envelope and csv stream") {
  const auto p = envelope_of("normalform --kind 3 --n1 2 --n2 2 --n3 2").at("payload");
  CHECK(p.at("zero") == false);
  CHECK(p.at("beta").get<double>() ==
        Catch::Approx(1.0 / (3.0 * std::sqrt(8.0))).epsilon(1e-12));
  const auto zero = envelope_of("normalform --kind 1 --n1 5 --n2 5 --n3 8").at("payload");
  CHECK(zero.at("zero") == true);

  const auto csv = run_cli("normalform --kind 1 --n-max 4 --format csv");
  REQUIRE(csv.exit_code == 0);
  std::istringstream lines(csv.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "kind,n1,n2,n3,zero,beta");
  std::size_t rows = 0;
  std::string first_row;
  while (std::getline(lines, line)) {
    if (rows == 0) first_row = line;
    ++rows;
  }
  CHECK(rows == 27);  // (4 - 2 + 1)^3 triples
  const auto c222 = droplet::resonance::normal_form_coeff(1, 2, 2, 2);
  std::ostringstream expect;
  expect << "1,2,2,2,0,";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", c222.beta);
  expect << buf;
  CHECK(first_row == expect.str());
}

TEST_CASE("evolve csv streams the four diagnostic columns") {
  const auto csv = run_cli("evolve --n-max 8 --t-final 1 --samples 5 --family zonal --format csv");
  REQUIRE(csv.exit_code == 0);
  std::istringstream lines(csv.out);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,L2,energy2,L4");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 5);
  CHECK(rows.front().substr(0, 6) == "0,1,0.");  // t=0, L2=1, energy2=0.5...
  for (const auto& r : rows) CHECK(r.find(",1,0.5,") != std::string::npos);
}

TEST_CASE("evolve json reports exact volume and momentum conservation") {
  const auto p =
      envelope_of("evolve --n-max 6 --t-final 2 --samples 9 --family random --seed 5")
          .at("payload");
  CHECK(p.at("volume_drift") == 0.0);
  CHECK(p.at("momentum_drift") == 0.0);
  REQUIRE(p.at("points").size() == 9);
  const double l0 = p.at("points")[0].at("L2").get<double>();
  for (const auto& pt : p.at("points"))
    CHECK(pt.at("L2").get<double>() == Catch::Approx(l0).epsilon(1e-12));
}

TEST_CASE("strichartz envelope matches an in-process report") {
  const auto p =
      envelope_of(
          "--threads 1 strichartz --family band --n-max 10 --t-final 0.3 --s 0.5 --seed 99 "
          "--time-samples 64")
          .at("payload");
  const auto r = droplet::evolution::strichartz_report(
      droplet::evolution::DataFamily::Band, 10, 0.3, 0.5, 99, 64, 1);
  CHECK(p.at("ratio").get<double>() == r.ratio);
  CHECK(p.at("spacetime_L4").get<double>() == r.spacetime_norm);
  CHECK(p.at("sobolev_norm").get<double>() == r.data_norm);
  CHECK(p.at("time_samples").get<unsigned>() == r.time_samples);
}

TEST_CASE("exit codes distinguish parse errors from runtime failures") {
  CHECK(run_cli("no-such-command").exit_code == 2);
  CHECK(run_cli("resonances").exit_code == 2);           // missing required --n-max
  CHECK(run_cli("resonances --n-max 1").exit_code == 1);  // domain error at runtime
  CHECK(run_cli("elliptic --c 3 --c-max 5").exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("counting --A 0").exit_code == 1);
  CHECK(run_cli("counting --A 7/0").exit_code == 1);
}
