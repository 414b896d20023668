#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radstar/io.hpp"
#include "radstar/steady_star.hpp"

using namespace radstar;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmpdir() {
  const fs::path d = fs::temp_directory_path() / "radstar_io_tests";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("doubles round-trip through the fixed decimal format") {
  for (double v : {0.1, 1.0 / 3.0, 6.896848619790, -2.5e-300, 1e17, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("CSV write-read-write is byte-identical") {
  const fs::path a = tmpdir() / "a.csv", b = tmpdir() / "b.csv";
  CsvTable t;
  t.columns = {"x", "y", "z"};
  t.rows = {{0.1, 1.0 / 3.0, -7.0}, {2.0, 6.896848619790, 1e-300}};
  write_csv(t, a.string());
  const CsvTable back = read_csv(a.string());
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(back.rows[i] == t.rows[i]);
  write_csv(back, b.string());
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("CSV uses LF endings and a header row") {
  const fs::path p = tmpdir() / "lf.csv";
  CsvTable t;
  t.columns = {"a"};
  t.rows = {{1.0}};
  write_csv(t, p.string());
  const std::string body = slurp(p);
  CHECK(body == "a\n1\n");
}

TEST_CASE("config parser accepts key=value with comments") {
  const auto kv = parse_config_text(
      "# run setup\n"
      "t_end = 1.5\n"
      "\n"
      "n=256   # cells\n"
      "initial = selfsimilar\n");
  CHECK(kv.at("t_end") == "1.5");
  CHECK(kv.at("n") == "256");
  CHECK(kv.at("initial") == "selfsimilar");
}

TEST_CASE("config parser reports the offending line") {
  try {
    parse_config_text("a = 1\nb = 2\nthis is not a pair\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  try {
    parse_config_text("= empty\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 1);
  }
}

TEST_CASE("manifests are deterministic") {
  const fs::path a = tmpdir() / "m1.json", b = tmpdir() / "m2.json";
  RunManifest m;
  m.command = "steady";
  m.config = {{"K", "1"}, {"epsilon", "0.5"}};
  m.summary = {{"R", format_double(3.141592653589793)}};
  m.outputs = {"profile.csv", "profile.json"};
  write_manifest(m, a.string());
  write_manifest(m, b.string());
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("steady") != std::string::npos);
}

TEST_CASE("profile and snapshot tables carry the documented columns") {
  StarParams p;
  p.K = 1.0;
  p.epsilon = 0.5;
  const SteadyProfile prof = build_steady_profile(p, 1.0 / std::sqrt(2.0), 1.0, 256);
  const CsvTable pt = profile_table(prof);
  CHECK(pt.columns == std::vector<std::string>{"r", "u", "rho", "theta", "psi"});
  CHECK(pt.rows.size() == prof.r_grid.size());

  const LagrangianGrid g = build_grid(prof, 32);
  const LagrangianState s = init_from_steady(prof, [](double) { return 0.0; }, g);
  const CsvTable st = snapshot_table(s, g);
  CHECK(st.rows.size() == (g.N + 1) + g.N);
  // face block then cell block
  CHECK(st.rows.front()[0] == 0.0);
  CHECK(st.rows.back()[0] == 1.0);
}
