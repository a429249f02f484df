#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "mestd/hbrate.hpp"
#include "mestd/solver.hpp"

using namespace mestd;

namespace {

const std::string kConfigs = std::string(MESTD_GOLDEN_DIR) + "/../configs/";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

double footer(const std::string& text, const std::string& key) {
  const auto at = text.find("# " + key + "=");
  REQUIRE(at != std::string::npos);
  return std::stod(text.substr(at + key.size() + 3));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void check_csv_shape(const std::string& text) {
  const auto rows = parse_csv(text);
  REQUIRE(rows.size() >= 2);
  for (const auto& r : rows) CHECK(r.size() == rows[0].size());
  CHECK(text.find('\r') == std::string::npos);
}

}  // namespace

TEST_CASE("two-state rows") {
  auto r = run({"two-state", "--config", kConfigs + "two_state_base.json"});
  CHECK(r.code == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][8] == "R2");
  CHECK(std::stod(rows[1][8]) == 0.0);

  r = run({"two-state", "--config", kConfigs + "two_state.json"});
  CHECK(r.code == 0);
  rows = parse_csv(r.out);
  CHECK(std::stod(rows[1][8]) == 0.0);
  CHECK(std::abs(std::stod(rows[1][9]) - 0.0651) < 5e-5);
  CHECK(rows[1][10] == "BaseOnly");

  // Gains given in dB are converted on load.
  const auto db = run({"two-state", "--config", kConfigs + "two_state_db.json"});
  CHECK(db.out == r.out);
}

TEST_CASE("malformed probabilities exit with a validation error") {
  const auto r = run({"two-state", "--config", kConfigs + "bad_probs.json"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("ProbSumMismatch", 0) == 0);
  CHECK(r.out.empty());
}

TEST_CASE("missing or unreadable inputs") {
  CHECK(run({"two-state"}).code == 2);
  CHECK(run({"two-state", "--config", kConfigs + "nope.json"}).code == 2);
  CHECK(run({"mstate", "--config", kConfigs + "rician32.json"}).code == 2);  // no discretization block
  CHECK(run({"continuous", "--config", kConfigs + "two_state.json"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
}

TEST_CASE("mstate reproduces the K=32 multiplier") {
  const auto r = run({"mstate", "--config", kConfigs + "fig5.json", "--seedless"});
  CHECK(r.code == 0);
  check_csv_shape(r.out);
  CHECK(parse_csv(r.out).size() == 151);
  CHECK(std::abs(footer(r.out, "mu") - 0.56) <= 0.02);
  CHECK(footer(r.out, "kkt_residual") <= 1e-8);
}

TEST_CASE("mstate single state and oracle agreement") {
  auto r = run({"mstate", "--config", kConfigs + "single_state.json"});
  CHECK(r.code == 0);
  auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(std::stod(rows[1][3]) - wyner_ziv_distortion(SourceModel(2.0, 0.7), 3.0)) < 1e-9);

  r = run({"mstate", "--config", kConfigs + "three_state.json"});
  CHECK(r.code == 0);
  const auto cfg = cli::load_config(kConfigs + "three_state.json");
  const auto oracle = brute_force_oracle(std::get<DiscreteFading>(cfg.fading), cfg.source, 1e-3);
  CHECK(std::abs(footer(r.out, "expected_distortion") - oracle.expected_distortion) <= 2e-3);
}

TEST_CASE("mstate at the iteration cap still writes its table") {
  const auto r = run({"mstate", "--config", kConfigs + "capped.json"});
  CHECK(r.code == 3);
  CHECK(parse_csv(r.out).size() == 151);
  CHECK(r.out.find("# converged=false") != std::string::npos);
  CHECK(r.err.find("MaxIterationsExceeded") != std::string::npos);
}

TEST_CASE("tolerance flag reaches the solver") {
  const auto r = run({"mstate", "--config", kConfigs + "fig5.json", "--tolerance", "1e-3"});
  CHECK(r.code == 0);
  CHECK(footer(r.out, "kkt_residual") <= 1e-3);
  CHECK(run({"mstate", "--config", kConfigs + "fig5.json", "--tolerance", "-1"}).code == 2);
}

TEST_CASE("continuous JSON") {
  auto r = run({"continuous", "--config", kConfigs + "rayleigh.json"});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("s_a").get<double>() == 0.0);
  for (const char* key : {"s_a", "mu", "expected_distortion", "certificate_min_lambda", "certificate_balance"}) {
    CHECK(j.contains(key));
  }

  r = run({"continuous", "--config", kConfigs + "rician32.json"});
  CHECK(r.code == 0);
  j = nlohmann::json::parse(r.out);
  CHECK(std::abs(j.at("s_a").get<double>() - 0.55) < 0.01);

  r = run({"continuous", "--config", kConfigs + "bimodal.json"});
  CHECK(r.code == 4);
  CHECK(r.err.rfind("NotQuasiconcave", 0) == 0);
}

TEST_CASE("quadrature tolerance from the environment") {
  setenv("MESTD_QUAD_TOL", "1e-8", 1);
  const auto loose = run({"continuous", "--config", kConfigs + "rician32.json"});
  setenv("MESTD_QUAD_TOL", "abc", 1);
  const auto bad = run({"continuous", "--config", kConfigs + "rician32.json"});
  unsetenv("MESTD_QUAD_TOL");
  CHECK(loose.code == 0);
  CHECK(std::abs(nlohmann::json::parse(loose.out).at("s_a").get<double>() - 0.553369) < 1e-5);
  CHECK(bad.code == 2);
}

TEST_CASE("discretize") {
  const auto r = run({"discretize", "--config", kConfigs + "rayleigh_bins.json"});
  CHECK(r.code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(std::abs(std::stod(rows[1][2]) - (1.0 - std::exp(-1.0))) < 1e-11);
  CHECK(std::abs(std::stod(rows[2][2]) - std::exp(-1.0)) < 1e-11);
  const auto j = run({"discretize", "--config", kConfigs + "rayleigh_bins.json", "--format", "json"});
  CHECK(nlohmann::json::parse(j.out).at("probs").size() == 2);
}

TEST_CASE("JSON and CSV carry the same digits") {
  const auto csv = run({"mstate", "--config", kConfigs + "three_state.json"});
  const auto json = run({"mstate", "--config", kConfigs + "three_state.json", "--format", "json"});
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j.at("expected_distortion").get<double>() == footer(csv.out, "expected_distortion"));
  CHECK(j.at("layers").size() == 3);
}

TEST_CASE("reruns are byte-identical and --out writes the same bytes") {
  const std::string path = std::string(MESTD_SCRATCH_DIR) + "/rerun.csv";
  const auto a = run({"mstate", "--config", kConfigs + "fig5.json"});
  const auto b = run({"mstate", "--config", kConfigs + "fig5.json", "--out", path});
  CHECK(b.out.empty());
  CHECK(read_file(path) == a.out);
  const auto s1 = run({"sweep", "fig4", "--set", "M=10", "--threads", "1"});
  const auto s4 = run({"sweep", "fig4", "--set", "M=10", "--threads", "4"});
  CHECK(s1.code == 0);
  CHECK(s1.out == s4.out);
}

TEST_CASE("sweep figures") {
  auto r = run({"sweep", "fig7", "--set", "K_step=16"});
  CHECK(r.code == 0);
  check_csv_shape(r.out);
  CHECK(r.out.rfind("Rx,K,s_a,mu,ED\n", 0) == 0);
  CHECK(parse_csv(r.out).size() == 1 + 4 * 5);

  r = run({"sweep", "fig6", "--set", "M=10", "--set", "R_max=0.5"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("family,K,Rx,ED,no_si,wz\n", 0) == 0);
  for (const auto& row : parse_csv(r.out)) {
    if (row[0] == "family") continue;
    CHECK(std::stod(row[5]) <= std::stod(row[3]));
    CHECK(std::stod(row[3]) <= std::stod(row[4]));
  }

  r = run({"sweep", "fig4", "--set", "M=10"});
  CHECK(r.code == 0);
  const auto rows = parse_csv(r.out);
  CHECK(rows.size() == 1 + 24 * 10);
  CHECK(rows.back()[4] == "10");

  CHECK(run({"sweep", "fig9"}).code == 2);
  CHECK(run({"sweep", "fig4", "--set", "bogus=1"}).code == 2);
  CHECK(run({"sweep", "fig4", "--set", "M"}).code == 2);
  CHECK(run({"sweep", "fig4", "--set", "M=0"}).code == 2);
}

TEST_CASE("golden sweeps") {
  struct Golden {
    const char* file;
    std::vector<std::string> args;
  };
  const Golden goldens[] = {
      {"fig3.csv", {"sweep", "fig3"}},
      {"fig4_M10.csv", {"sweep", "fig4", "--set", "M=10"}},
      {"fig5.csv", {"sweep", "fig5"}},
      {"fig6_M30.csv", {"sweep", "fig6", "--set", "M=30"}},
      {"fig7_Kstep4.csv", {"sweep", "fig7", "--set", "K_step=4"}},
      {"fig8_grid256.csv", {"sweep", "fig8", "--set", "grid=256"}},
  };
  for (const auto& g : goldens) {
    CAPTURE(g.file);
    const auto r = run(g.args);
    CHECK(r.code == 0);
    CHECK(r.out == read_file(std::string(MESTD_GOLDEN_DIR) + "/" + g.file));
  }
}

TEST_CASE("config parsing") {
  const auto cfg = cli::parse_config(R"({"source": {"rate": 1}, "fading": {"type": "nakagami", "k_db": 10},
                                         "output": {"format": "json", "path": "x.json"}})");
  CHECK(cfg.source.sigma2 == 1.0);
  CHECK(cfg.format == cli::Format::Json);
  CHECK(*cfg.output_path == "x.json");
  CHECK(std::holds_alternative<cli::ContinuousScenario>(cfg.fading));
  CHECK_THROWS_AS(cli::parse_config("{"), Error);
  CHECK_THROWS_AS(cli::parse_config(R"({"source": {"rate": 1}, "fading": {"type": "weird"}})"), Error);
  CHECK_THROWS_AS(cli::parse_config(R"({"source": {"rate": 1, "rate_db": 0}, "fading": {"type": "rayleigh"}})"),
                  Error);
  CHECK(cli::fmt(0.1) == "0.1");
  CHECK(cli::fmt(1.0 / 3.0) == "0.333333333333");
}
