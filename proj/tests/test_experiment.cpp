#include <doctest.h>

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gibbsstab/experiment.hpp"
#include "gibbsstab/json_io.hpp"
#include "support.hpp"

using namespace gstab;
namespace fs = std::filesystem;
using testing::read_file;

namespace {

json load_preset(const std::string& name) {
  std::ifstream is(std::string(GSTAB_PRESET_DIR) + "/" + name);
  REQUIRE(is.good());
  return json::parse(is);
}

json small_run_config() {
  return json::parse(R"({
    "name": "small",
    "model": {"f1": {"kind": "cauchy", "scale": 1}, "f2": {"kind": "gauss", "variance": 5}, "y": 0},
    "kernel": [{"type": "centred"}, {"type": "noncentred"}],
    "run": {"theta0": [0, 50], "n_iter": 200, "seed": 5, "n_chains": 2, "record_x": true}
  })");
}

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GSTAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("distributions") {
    CHECK(dist_from_json(json::parse(R"({"kind": "gauss", "variance": 4})")) == ErrorDist::gaussian(2.0));
    CHECK(dist_from_json(json::parse(R"({"kind": "cauchy"})")) == ErrorDist::cauchy(1.0));
    CHECK(dist_from_json(json::parse(R"({"kind": "exppower", "scale": 2, "beta": 4})")) ==
          ErrorDist::exp_power(2.0, 4.0));
    CHECK(dist_from_json(to_json(ErrorDist::double_exp(0.5))) == ErrorDist::double_exp(0.5));
    try {
      dist_from_json(json::parse(R"({"kind": "gauss", "scael": 1})"), "model.f1");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("model.f1") != std::string::npos);
      CHECK(std::string(e.what()).find("scael") != std::string::npos);
    }
    CHECK_THROWS_AS(dist_from_json(json::parse(R"({"kind": "student"})")), ConfigError);
    CHECK_THROWS_AS(dist_from_json(json::parse(R"({"kind": "gauss", "scale": 1, "variance": 1})")), ConfigError);
    CHECK_THROWS_AS(dist_from_json(json::parse(R"({"kind": "gauss", "beta": 3})")), ConfigError);
    CHECK_THROWS_AS(dist_from_json(json::parse(R"({"kind": "gauss", "scale": -1})")), ConfigError);
  }
  SUBCASE("models") {
    const auto m = model_from_json(json::parse(R"({"f1": {"kind": "cauchy"}, "f2": {"kind": "gauss"}, "y": 1.5})"));
    CHECK(m.is_simple());
    CHECK(m.y_scalar() == 1.5);
    const auto r = model_from_json(
        json::parse(R"({"f1": {"kind": "cauchy"}, "f2": {"kind": "gauss"}, "y": [[1, 2], [3]]})"));
    CHECK(r.m() == 2);
    CHECK(r.total_obs() == 3);
    CHECK(model_from_json(to_json(r)).total_obs() == 3);
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"f1": {"kind": "cauchy"}, "y": 0})")), ConfigError);
    CHECK_THROWS_AS(
        model_from_json(json::parse(R"({"f1": {"kind": "cauchy"}, "f2": {"kind": "gauss"}, "y": 0, "z": 1})")),
        ConfigError);
  }
  SUBCASE("latent GP models") {
    const json j = load_preset("fig2.json").at("model");
    CHECK(is_lgp_model(j));
    const LgpModel m = lgp_model_from_json(j);
    CHECK(m.p() == 100);
    CHECK(m.sigma()(0, 1) == doctest::Approx(0.9));
    // Simulated data are reproducible from the data seed.
    CHECK(lgp_model_from_json(j).y() == m.y());
    const LgpModel s = lgp_model_from_json(json::parse(R"({"type": "lgp", "sigma": [[1, 0.2], [0.2, 1]], "y": [0, 1]})"));
    CHECK(s.p() == 2);
    CHECK_THROWS_AS(lgp_model_from_json(json::parse(R"({"type": "lgp", "sigma": [[1, 0.2], [0.2]], "y": [0, 1]})")),
                    ConfigError);
  }
  SUBCASE("kernels and tuning blocks") {
    CHECK(kernel_from_json(json::parse(R"({"type": "partially_centred", "rho": 0.25})")).id() == "PC(0.25)");
    CHECK(kernel_from_json(json::parse(R"({"type": "hybrid", "p_mix": 0.3})")).p_mix == 0.3);
    CHECK(kernel_from_json(to_json(Parametrisation::grouped())).kind == Parametrisation::Kind::Grouped);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"type": "centred", "rho": 0.5})")), ConfigError);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"type": "partially_centred"})")), ConfigError);
    CHECK_THROWS_AS(kernel_from_json(json::parse(R"({"type": "blocked"})")), ConfigError);

    DiagConfig d;
    d.n_rep = 123;
    d.theta_ladder = {5, 50};
    const DiagConfig back = diag_from_json(to_json(d));
    CHECK(back.n_rep == 123);
    CHECK(back.theta_ladder == d.theta_ladder);
    CHECK_THROWS_AS(diag_from_json(json::parse(R"({"n_reps": 10})")), ConfigError);
    CHECK_THROWS_AS(slice_from_json(json::parse(R"({"max_shrink": 5})")), ConfigError);
    CHECK(qrate_from_json("likelihood_only") == QRate::LikelihoodOnly);
    CHECK_THROWS_AS(qrate_from_json("posterior"), ConfigError);
    CHECK(mala_from_json(json::parse(R"({"tune_iter": 7})")).tune_iter == 7);
    CHECK(quad_from_json(to_json(QuadConfig{})).rel_tol == QuadConfig{}.rel_tol);
  }
}

TEST_CASE("thread budget and parallel_for") {
  setenv("GSL_THREADS", "3", 1);
  CHECK(thread_budget() == 3);
  setenv("GSL_THREADS", "zero", 1);
  CHECK(thread_budget() >= 1);
  setenv("GSL_THREADS", "2", 1);
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 7) throw Error("boom");
                  }),
                  Error);
  unsetenv("GSL_THREADS");
}

TEST_CASE("run command") {
  const fs::path dir = testing::temp_dir("run");
  CliOverrides cli;
  cli.out_dir = dir.string();
  std::ostringstream log, err;
  const json cfg = small_run_config();
  REQUIRE(cmd_run(cfg, cli, log, err) == kExitOk);
  const fs::path csv = dir / "small_P0_theta0_50_chain1.csv";
  REQUIRE(fs::exists(csv));
  const auto rows = csv_rows(read_file(csv));
  REQUIRE(rows.size() == 201);
  CHECK(rows[0] == "iter,theta,x_1");
  CHECK(rows[1].rfind("1,", 0) == 0);

  const json summary = json::parse(read_file(dir / "small_summary.json"));
  CHECK(summary.at("chains").size() == 8);
  CHECK(summary.at("chains")[0].at("acf").size() == 50);
  CHECK(summary.at("config").at("run").at("seed") == 5);

  SUBCASE("reruns are byte identical") {
    std::vector<std::string> before;
    for (const auto& e : fs::directory_iterator(dir)) before.push_back(read_file(e.path()));
    REQUIRE(cmd_run(cfg, cli, log, err) == kExitOk);
    std::vector<std::string> after;
    for (const auto& e : fs::directory_iterator(dir)) after.push_back(read_file(e.path()));
    CHECK(std::multiset<std::string>(before.begin(), before.end()) ==
          std::multiset<std::string>(after.begin(), after.end()));
  }
  SUBCASE("thread count does not change the output") {
    const std::string first = read_file(csv);
    setenv("GSL_THREADS", "1", 1);
    REQUIRE(cmd_run(cfg, cli, log, err) == kExitOk);
    unsetenv("GSL_THREADS");
    CHECK(read_file(csv) == first);
  }
  SUBCASE("seed override") {
    const std::string first = read_file(csv);
    CliOverrides other = cli;
    other.seed = 6;
    REQUIRE(cmd_run(cfg, other, log, err) == kExitOk);
    CHECK(read_file(csv) != first);
  }
  SUBCASE("configuration errors") {
    json bad = cfg;
    bad["run"]["n_iters"] = 10;
    CHECK(cmd_run(bad, cli, log, err) == kExitConfig);
    bad = cfg;
    bad["mala"] = json::object();
    CHECK(cmd_run(bad, cli, log, err) == kExitConfig);
    bad = cfg;
    bad["run"]["burn_in"] = 500;
    CHECK(cmd_run(bad, cli, log, err) == kExitConfig);
    bad = cfg;
    bad.erase("model");
    CHECK(cmd_run(bad, cli, log, err) == kExitConfig);
    // The grouped kernel needs Cauchy / Gaussian errors: a runtime failure.
    bad = cfg;
    bad["model"]["f1"] = json::parse(R"({"kind": "gauss"})");
    bad["kernel"] = json::parse(R"({"type": "grouped"})");
    CHECK(cmd_run(bad, cli, log, err) == kExitRuntime);
  }
}

TEST_CASE("figure presets") {
  SUBCASE("cauchy-gaussian traces") {
    const fs::path dir = testing::temp_dir("fig1");
    CliOverrides cli;
    cli.out_dir = dir.string();
    std::ostringstream log, err;
    REQUIRE(cmd_run(load_preset("fig1.json"), cli, log, err) == kExitOk);
    for (const char* f : {"fig1_P0_theta0_0_chain0.csv", "fig1_P0_theta0_200_chain0.csv"}) {
      CAPTURE(f);
      REQUIRE(fs::exists(dir / f));
      CHECK(csv_rows(read_file(dir / f)).size() == 10001);
    }
  }
  SUBCASE("latent GP traces") {
    const fs::path dir = testing::temp_dir("fig2");
    CliOverrides cli;
    cli.out_dir = dir.string();
    std::ostringstream log, err;
    json cfg = load_preset("fig2.json");
    cfg["run"]["n_iter"] = 600;
    REQUIRE(cmd_run(cfg, cli, log, err) == kExitOk);
    for (const char* f : {"fig2_P0_theta0_500_chain0.csv", "fig2_P1_theta0_500_chain0.csv",
                          "fig2_P0_theta0_0_chain0.csv", "fig2_P1_theta0_0_chain0.csv"}) {
      CAPTURE(f);
      REQUIRE(fs::exists(dir / f));
      CHECK(csv_rows(read_file(dir / f)).size() == 601);
    }
    const json summary = json::parse(read_file(dir / "fig2_summary.json"));
    const json& c0 = summary.at("chains")[0];
    CHECK(c0.at("burn_in") == 500);
    CHECK(c0.at("stats").contains("mala_step_size"));
    CHECK(c0.at("stats").contains("mala_accept_rate"));
  }
}

TEST_CASE("table2 command") {
  const fs::path dir = testing::temp_dir("table2");
  json cfg = load_preset("table2.json");
  cfg["diag"]["n_rep"] = 3000;
  CliOverrides cli;
  cli.out_dir = dir.string();
  std::ostringstream log, err;

  cli.cell = "C,G,P0";
  REQUIRE(cmd_table2(cfg, cli, log, err) == kExitOk);
  auto rows = csv_rows(read_file(dir / "table2.csv"));
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == "panel,z2,C,E,G,L");
  CHECK(rows[3] == "P0,G,N,-,-,-");
  CHECK(rows[5] == "P1,C,-,-,-,-");
  const json ev = json::parse(read_file(dir / "table2_evidence.json"));
  REQUIRE(ev.at("cells").size() == 1);
  CHECK(ev.at("cells")[0].at("theory") == "N");
  CHECK(ev.at("cells")[0].at("report").contains("evidence"));

  cli.cell = "E,E,P1";
  REQUIRE(cmd_table2(cfg, cli, log, err) == kExitOk);
  rows = csv_rows(read_file(dir / "table2.csv"));
  CHECK(rows[6] == "P1,E,-,U/G,-,-");

  cli.cell = "C,X,P0";
  CHECK(cmd_table2(cfg, cli, log, err) == kExitConfig);
  cli.cell = "C,G";
  CHECK(cmd_table2(cfg, cli, log, err) == kExitConfig);
  cli.cell.reset();
  json bad = cfg;
  bad["ee_ratio"] = 2;
  CHECK(cmd_table2(bad, cli, log, err) == kExitConfig);
}

TEST_CASE("oracle queries") {
  const json r = oracle_query(json::parse(R"({"query": "gaussian_rate", "sigma1": 1, "sigma2": 1, "rho": 0})"));
  CHECK(r.at("value") == 0.5);
  CHECK(r.at("query") == "gaussian_rate");
  CHECK(r.at("inputs").at("sigma1") == 1);
  const json m = oracle_query(json::parse(R"({"query": "conditional_mean", "theta": 4,
      "model": {"f1": {"kind": "gauss"}, "f2": {"kind": "gauss"}, "y": 0}})"));
  CHECK(m.at("value").get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  const json t = oracle_query(json::parse(R"({"query": "marginal_tail_prob", "a": 40,
      "model": {"f1": {"kind": "cauchy"}, "f2": {"kind": "gauss", "variance": 5}, "y": 0}})"));
  CHECK(t.at("value").get<double>() == doctest::Approx(0.0159623).epsilon(1e-4));
  CHECK_THROWS_AS(oracle_query(json::parse(R"({"query": "posterior_mode"})")), ConfigError);
  CHECK_THROWS_AS(oracle_query(json::parse(R"({"query": "gaussian_rate", "sigma1": 1, "sigma2": 1, "rho": 0, "x": 1})")),
                  ConfigError);
  CHECK_THROWS_AS(oracle_query(json::parse(R"({"query": "gaussian_rate", "sigma1": 1, "sigma2": 1, "rho": 2})")),
                  ConfigError);
  CHECK_THROWS_AS(oracle_query(json::parse(R"([1, 2])")), ConfigError);

  std::ostringstream out, err;
  CHECK(cmd_oracle(json::parse(R"({"query": "gaussian_rate", "sigma1": 1, "sigma2": 2, "rho": 1})"), {}, out, err) ==
        kExitOk);
  CHECK(json::parse(out.str()).at("value").get<double>() == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(cmd_oracle(json::parse(R"({"query": "nope"})"), {}, out, err) == kExitConfig);
}

TEST_CASE("diagnose command") {
  const fs::path dir = testing::temp_dir("diagnose");
  CliOverrides cli;
  cli.out_dir = dir.string();
  std::ostringstream log, err;
  const json cfg = json::parse(R"({
    "name": "cg",
    "model": {"f1": {"kind": "cauchy"}, "f2": {"kind": "gauss", "variance": 5}, "y": 0},
    "kernel": {"type": "noncentred"},
    "diag": {"n_rep": 1000, "return_seeds": 5},
    "limit_law": {"dist": {"kind": "gauss", "variance": 10}},
    "seed": 3
  })");
  REQUIRE(cmd_diagnose(cfg, cli, log, err) == kExitOk);
  const json doc = json::parse(read_file(dir / "cg_report.json"));
  CHECK(doc.at("report").at("classification") == "U");
  CHECK(doc.at("properties").at("RID") == true);
  CHECK(doc.at("config").at("seed") == 3);
  json bad = cfg;
  bad["model"] = load_preset("fig2.json").at("model");
  CHECK(cmd_diagnose(bad, cli, log, err) == kExitConfig);
}

TEST_CASE("command-line binary") {
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli(R"(oracle --query '{"query": "gaussian_rate", "sigma1": 1, "sigma2": 1, "rho": 1}')") == 0);
  CHECK(run_cli(R"(oracle --query '{"query": "nope"}')") == kExitConfig);
  CHECK(run_cli(R"(oracle --query 'not json')") == kExitConfig);
  CHECK(run_cli("run --config /nonexistent/config.json") == kExitConfig);
  const fs::path dir = testing::temp_dir("cli");
  const fs::path cfg = dir / "cfg.json";
  json c = small_run_config();
  c["run"]["n_iter"] = 20;
  std::ofstream(cfg) << c.dump();
  CHECK(run_cli("run --config " + cfg.string() + " --out " + (dir / "out").string() + " --seed 9") == 0);
  CHECK(fs::exists(dir / "out" / "small_P1_theta0_0_chain0.csv"));
  const json summary = json::parse(read_file(dir / "out" / "small_summary.json"));
  CHECK(summary.at("seed") == 9);
}
