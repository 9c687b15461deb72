#include "frc/cli.hpp"
#include "frc/fleet.hpp"
#include "support.hpp"

#include <doctest.h>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

using namespace frc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Workdir {
  fs::path root;
  // One directory per process and case so parallel runs do not collide.
  Workdir() {
    static int counter = 0;
    root = fs::temp_directory_path() / fmt::format("frcctl-test-{}-{}", ::getpid(), ++counter);
    fs::create_directories(root);
  }
  ~Workdir() { fs::remove_all(root); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(root / name) << text;
    return (root / name).string();
  }
  std::string path(const std::string& name) const { return (root / name).string(); }
};

std::string damping_only_fleet(const Workdir& w) {
  return w.write("damping.json", serialize_fleet(testing::make_fleet({}, 50000, 1.0)));
}

std::string standard_fleet(const Workdir& w) {
  return w.write("standard.json", serialize_fleet(generate_fleet(testing::standard_spec())));
}

}  // namespace

TEST_CASE("frc-build") {
  Workdir w;
  const auto fleet = standard_fleet(w);
  const auto a = run({"frc-build", "--fleet", fleet});
  CHECK(a.code == 0);
  CHECK(a.out.rfind("delta_f_hz,freq_hz,response_mw\n", 0) == 0);
  CHECK(a.err.find("breakpoints=") != std::string::npos);
  CHECK(a.err.find("beta_at_-0.1hz") != std::string::npos);
  CHECK(run({"frc-build", "--fleet", fleet}).out == a.out);

  const auto file = run({"frc-build", "--fleet", fleet, "--out", w.path("c.csv"), "--dense-step", "0.01"});
  CHECK(file.code == 0);
  CHECK(file.out.empty());
  CHECK(slurp(w.path("c.csv")).size() > a.out.size());

  CHECK(run({"frc-build", "--fleet", w.path("missing.json")}).code == 2);
  CHECK(run({"frc-build"}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);

  auto bad = generate_fleet(testing::standard_spec());
  bad.units[2].pgen_mw = bad.units[2].pmax_mw + 5;
  const auto invalid = run({"frc-build", "--fleet", w.write("bad.json", serialize_fleet(bad))});
  CHECK(invalid.code == 1);
  CHECK(invalid.err.find(bad.units[2].id) != std::string::npos);
  CHECK(invalid.out.empty());

  CHECK(run({"frc-build", "--fleet", w.write("junk.json", "{not json")}).code == 1);
}

TEST_CASE("frc-update") {
  Workdir w;
  auto f = generate_fleet(testing::standard_spec());
  for (std::size_t i = 0; i < f.units.size(); i += 4) f.units[i].status = Status::Off;
  const auto fleet = w.write("f.json", serialize_fleet(f));

  const auto built = run({"frc-build", "--fleet", fleet});
  const auto same = run({"frc-update", "--fleet", fleet});
  CHECK(same.code == 0);
  CHECK(same.out == built.out);

  std::vector<std::string> args{"frc-update", "--fleet", fleet, "--check"};
  for (std::size_t i = 0; i < f.units.size(); i += 3) {
    args.push_back("--toggle");
    args.push_back(f.units[i].id + (f.units[i].is_on() ? "=off" : "=on"));
  }
  const auto checked = run(args);
  CHECK(checked.code == 0);
  const auto kv = key_values(checked.err);
  REQUIRE(kv.count("max_deviation_mw") == 1);
  CHECK(std::stod(kv.at("max_deviation_mw")) <= 1e-9);

  CHECK(run({"frc-update", "--fleet", fleet, "--toggle", "ghost=on"}).code == 1);
  CHECK(run({"frc-update", "--fleet", fleet, "--toggle", "badformat"}).code != 0);
}

TEST_CASE("steady") {
  Workdir w;
  const auto fleet = damping_only_fleet(w);
  auto r = run({"steady", "--fleet", fleet, "--loss", "0"});
  CHECK(r.code == 0);
  CHECK(std::stod(key_values(r.out).at("f_ss_hz")) == 60.0);

  r = run({"steady", "--fleet", fleet, "--loss", "500"});
  CHECK(r.code == 0);
  const auto kv = key_values(r.out);
  CHECK(std::stod(kv.at("f_ss_hz")) == doctest::Approx(59.4).epsilon(1e-12));
  CHECK(std::stod(kv.at("load_relief_mw")) == doctest::Approx(500.0));
  CHECK(kv.at("saturated_units").empty());

  const auto stiff = w.write("stiff.json", serialize_fleet(testing::make_fleet(
                                               {testing::governor_unit("A", 100, 80, 90)}, 80, 0.0)));
  r = run({"steady", "--fleet", stiff, "--loss", "50"});
  CHECK(r.code == 1);
  CHECK(r.err.find("collapse") != std::string::npos);
  CHECK(run({"steady", "--fleet", fleet}).code == 2);
  CHECK(run({"steady", "--fleet", fleet, "--loss", "lots"}).code == 2);
}

TEST_CASE("nadir") {
  Workdir w;
  const auto fleet = w.write("mass.json", serialize_fleet(testing::make_fleet(
                                              {testing::inertia_unit("N", 50000, 4)}, 50000, 1.0)));
  auto r = run({"nadir", "--fleet", fleet, "--loss", "0", "--horizon", "10"});
  CHECK(r.code == 0);
  CHECK(std::stod(key_values(r.out).at("nadir_hz")) == 60.0);

  std::vector<Unit> units;
  for (int i = 0; i < 6; ++i) units.push_back(testing::governor_unit(fmt::format("G{}", i), 500, 400, 475));
  const auto homogeneous = w.write("h.json", serialize_fleet(testing::make_fleet(units, 2400, 1.0)));
  r = run({"nadir", "--fleet", homogeneous, "--loss", "200", "--model", "both", "--horizon", "30"});
  CHECK(r.code == 0);
  auto kv = key_values(r.out);
  CHECK(std::abs(std::stod(kv.at("nadir_difference_hz"))) < 1e-6);
  CHECK(kv.count("clustered.nadir_hz") == 1);
  CHECK(kv.count("per_unit.nadir_hz") == 1);

  auto spec = testing::standard_spec();
  spec.renewable_fraction = 0.6;
  const auto renewable = w.write("r.json", serialize_fleet(generate_fleet(spec)));
  const auto scenario = w.write("s.json", R"({"loss_mw": 200, "event_time_s": 1, "horizon_s": 30, "step_s": 0.005})");
  r = run({"nadir", "--fleet", renewable, "--scenario", scenario, "--out", w.path("t.csv")});
  CHECK(r.code == 0);
  CHECK(std::stod(key_values(r.out).at("nadir_hz")) < 60.0);
  CHECK(slurp(w.path("t.csv")).rfind("time_s,freq_hz,delta_f_hz,pm_total_mw", 0) == 0);
  const auto again = run({"nadir", "--fleet", renewable, "--scenario", scenario, "--out", w.path("t2.csv")});
  CHECK(again.out == r.out);
  CHECK(slurp(w.path("t2.csv")) == slurp(w.path("t.csv")));

  // A fleet without rotating mass has no swing dynamics to simulate.
  CHECK(run({"nadir", "--fleet", damping_only_fleet(w), "--loss", "10"}).code == 1);
  CHECK(run({"nadir", "--fleet", fleet}).code == 2);
  CHECK(run({"nadir", "--fleet", fleet, "--loss", "10", "--model", "exact"}).code == 2);
}

TEST_CASE("validate") {
  Workdir w;
  const auto fleet = standard_fleet(w);
  auto r = run({"validate", "--fleet", fleet, "--losses", "100,500,1000"});
  CHECK(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "loss_mw,curve_f_ss_hz,settling_hz,abs_error_hz,status");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.rfind(',') + 1) == "ok");
  }
  CHECK(rows == 3);

  const auto stiff = w.write("stiff.json", serialize_fleet(testing::make_fleet(
                                               {testing::governor_unit("A", 100, 80, 90)}, 80, 0.0)));
  r = run({"validate", "--fleet", stiff, "--losses", "5,50"});
  CHECK(r.code == 0);
  CHECK(r.out.find("50,,,,skipped") != std::string::npos);
  CHECK(r.err.find("warning") != std::string::npos);

  CHECK(run({"validate", "--fleet", fleet, "--losses", ""}).code == 2);
}

TEST_CASE("gen-fleet") {
  Workdir w;
  const auto a = run({"gen-fleet", "--seed", "9", "--units", "40", "--renewable", "0.6", "--out", w.path("a.json")});
  const auto b = run({"gen-fleet", "--seed", "9", "--units", "40", "--renewable", "0.6", "--out", w.path("b.json")});
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  CHECK(slurp(w.path("a.json")) == slurp(w.path("b.json")));

  const auto f = load_fleet_file(w.path("a.json"));
  double sync = 0.0;
  double total = 0.0;
  for (const auto& u : f.units) {
    total += u.pmax_mw;
    if (!is_inverter_based(u.technology)) sync += u.pmax_mw;
  }
  CHECK(std::abs(sync - 0.4 * total) <= 1.0);

  const auto all = run({"gen-fleet", "--seed", "9", "--renewable", "1.0"});
  CHECK(all.code == 0);
  for (const auto& u : parse_fleet(all.out).units) CHECK(is_inverter_based(u.technology));

  CHECK(run({"gen-fleet", "--seed", "9", "--renewable", "1.5"}).code == 2);
  CHECK(run({"gen-fleet", "--units", "5"}).code == 2);
}

TEST_CASE("serve refuses bad input before binding") {
  Workdir w;
  CHECK(run({"serve", "--fleet", w.write("junk.json", "[]")}).code == 1);
  CHECK(run({"serve", "--fleet", standard_fleet(w), "--port", "70000"}).code == 1);
}
