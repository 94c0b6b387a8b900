#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "netes/config.hpp"
#include "netes/error.hpp"
#include "netes/experiment.hpp"
#include "netes/io.hpp"
#include "netes/metrics.hpp"

using namespace netes;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("netes_test_" + name);
  fs::remove_all(p);
  return p;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.name = "small";
  c.objective.kind = ObjectiveKind::Sphere;
  c.objective.dim = 6;
  c.agents = 10;
  c.iterations = 40;
  c.hyperparams.alpha = 0.05;
  c.hyperparams.sigma = 0.05;
  c.evaluation.probability = 0.3;
  c.seeds = {1, 2, 3};
  return c;
}

}  // namespace

TEST_CASE("minimal config resolves defaults") {
  const auto c = parse_config_text(R"({
    "objective": {"kind": "sphere"},
    "topology": {"family": "erdos_renyi", "p": 0.5, "density": null},
    "agents": 50,
    "seeds": [4]
  })");
  CHECK(c.agents == 50);
  CHECK(c.seeds == std::vector<std::uint64_t>{4});
  CHECK(c.topology.family == Family::ErdosRenyi);
  CHECK_FALSE(c.topology.density.has_value());
  CHECK(c.topology.params.p == 0.5);
  CHECK(c.hyperparams.alpha == 0.01);
  CHECK(c.hyperparams.sigma == 0.02);
  CHECK(c.hyperparams.broadcast_probability == 0.8);
  CHECK(c.hyperparams.weight_decay == 0.005);
  CHECK(c.evaluation.probability == 0.08);
  CHECK(c.evaluation.plateau_window == 50);
  CHECK(c.evaluation.plateau_threshold == 0.05);
  CHECK(c.init.scale == 0.05);

  const auto resolved = to_json(c);
  CHECK(resolved["hyperparams"]["sigma"] == 0.02);
  const auto again = parse_config(resolved);
  CHECK(to_json(again) == resolved);
}

TEST_CASE("config validation errors name the field") {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(R"({"agents": 51})").find("agents") != std::string::npos);
  const std::string fam = message(R"({"topology": {"family": "hypercube"}})");
  CHECK(fam.find("topology.family") != std::string::npos);
  CHECK(fam.find("erdos_renyi") != std::string::npos);
  CHECK(fam.find("scale_free") != std::string::npos);
  CHECK(message(R"({"agentz": 10})").find("agentz") != std::string::npos);
  CHECK(message(R"({"hyperparams": {"sigma": 0}})").find("sigma") != std::string::npos);
  CHECK(message(R"({"seeds": []})").find("seeds") != std::string::npos);
  CHECK(message(R"({"evaluation": {"probability": 1.5}})").find("probability") != std::string::npos);
  CHECK(message(R"({"agents": "ten"})").find("agents") != std::string::npos);
  CHECK(message(R"({"topology": {"density": 0.5, "p": 0.3}})").find("topology") != std::string::npos);
  const std::string parse = message("{\n  \"agents\": 10,\n  oops\n}");
  CHECK(parse.find("line 3") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("presets") {
  ExperimentConfig c = small_config();
  c.hyperparams.broadcast_probability = 0.0;
  const auto b = apply_preset(c, "broadcast-only");
  CHECK(b.topology.family == Family::Edgeless);
  CHECK(b.hyperparams.broadcast_probability == 0.8);
  CHECK(b.name == "small-broadcast-only");
  const auto s = apply_preset(c, "shared-init-no-broadcast");
  CHECK(s.topology.family == Family::Complete);
  CHECK(s.init.shared);
  CHECK(s.hyperparams.broadcast_probability == 0.0);
  const auto d = apply_preset(c, "distinct-init-broadcast");
  CHECK_FALSE(d.init.shared);
  CHECK(d.hyperparams.broadcast_probability == 0.8);
  CHECK(apply_preset(c, "netes").topology.family == Family::ErdosRenyi);
  CHECK_THROWS_AS(apply_preset(c, "bogus"), ConfigError);
}

TEST_CASE("evaluate_policy") {
  const Objective sphere(ObjectiveKind::Sphere, 3);
  CHECK(evaluate_policy(Eigen::VectorXd::Zero(3), sphere, 1) == 0.0);
  Eigen::VectorXd x(3);
  x << 0.1, -0.2, 0.3;
  CHECK(evaluate_policy(x, sphere, 5) == evaluate_policy(x, sphere, 1));
  CHECK_THROWS_AS(evaluate_policy(x, sphere, 0), InvalidArgument);

  PointMassTask t;
  t.task_seed = 3;
  const Objective pm(t);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(pm.dim()), 0.01);
  const MlpPolicy policy(t.layer_sizes(), w);
  CHECK(evaluate_policy(w, pm, 3) == rollout(t, policy));
}

TEST_CASE("detect_plateau") {
  CHECK(detect_plateau(std::vector<double>(120, -3.0)));
  CHECK(detect_plateau(std::vector<double>(100, 0.0)));
  std::vector<double> grow(120);
  for (int i = 0; i < 120; ++i) grow[static_cast<std::size_t>(i)] = std::pow(2.0, i);
  CHECK_FALSE(detect_plateau(grow));
  CHECK_FALSE(detect_plateau(std::vector<double>(30, 1.0)));
  CHECK_FALSE(detect_plateau(std::vector<double>(99, 1.0)));
  std::vector<double> step(100, 1.0);
  std::fill(step.begin() + 50, step.end(), 1.04);
  CHECK(detect_plateau(step));
  std::fill(step.begin() + 50, step.end(), 1.06);
  CHECK_FALSE(detect_plateau(step));
  std::vector<double> zero_then(100, 0.0);
  zero_then[99] = 1e-3;
  CHECK_FALSE(detect_plateau(zero_then));
}

TEST_CASE("aggregate") {
  const Summary ones = aggregate(std::vector<double>{1, 1, 1, 1});
  CHECK(ones.mean == 1.0);
  REQUIRE(ones.ci95_half_width.has_value());
  CHECK(*ones.ci95_half_width == 0.0);
  const Summary two = aggregate(std::vector<double>{0, 2});
  CHECK(two.mean == 1.0);
  CHECK(*two.ci95_half_width == doctest::Approx(12.706).epsilon(1e-4));
  const Summary one = aggregate(std::vector<double>{3});
  CHECK(one.mean == 3.0);
  CHECK_FALSE(one.ci95_half_width.has_value());
  CHECK_THROWS_AS(aggregate(std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(aggregate_runs({}), InvalidArgument);
}

TEST_CASE("forced evaluation count") {
  ExperimentConfig c = small_config();
  c.iterations = 10;
  c.evaluation.probability = 1.0;
  const RunResult r = run_seed(c, 1);
  REQUIRE(r.ok());
  CHECK(r.evals.size() == 10);
  CHECK(r.rows.size() == 10);

  c.evaluation.probability = 0.0;
  const RunResult last = run_seed(c, 1);
  REQUIRE(last.ok());
  CHECK(last.evals.size() == 1);
  CHECK(last.rows.back().eval_reward.has_value());
}

TEST_CASE("final metric is the max over recorded evaluations") {
  ExperimentConfig c = small_config();
  c.diagnostics.enabled = true;
  const auto results = run_experiment(c, 2);
  REQUIRE(results.size() == 3);
  for (const auto& r : results) {
    REQUIRE(r.ok());
    double best = -1e300;
    std::size_t evals = 0;
    for (const auto& row : r.rows)
      if (row.eval_reward) {
        best = std::max(best, *row.eval_reward);
        ++evals;
      }
    CHECK(evals == r.evals.size());
    CHECK(r.final_metric == best);
    for (const auto& row : r.rows) {
      CHECK(row.bound_holds.has_value());
      if (row.bound_holds) CHECK(*row.bound_holds);
      CHECK(row.update_variance.has_value() == !row.broadcast);
    }
  }
}

TEST_CASE("sphere runs improve on the initial population") {
  ExperimentConfig c;
  c.name = "sphere";
  c.objective.kind = ObjectiveKind::Sphere;
  c.objective.dim = 20;
  c.agents = 100;
  c.iterations = 150;
  c.hyperparams.broadcast_probability = 0.8;
  c.seeds.clear();
  for (std::uint64_t s = 0; s < 20; ++s) c.seeds.push_back(s);
  const auto results = run_experiment(c, 1);
  int improved = 0;
  for (const auto& r : results) {
    REQUIRE(r.ok());
    improved += r.final_metric > r.initial_eval;
  }
  CHECK(improved >= 19);
}

TEST_CASE("a failing seed does not stop the others") {
  ExperimentConfig c = small_config();
  c.topology.density.reset();
  c.topology.params.p = 0.01;
  c.topology.max_attempts = 2;
  c.agents = 40;
  c.seeds = {1, 2};
  const auto results = run_experiment(c, 1);
  REQUIRE(results.size() == 2);
  CHECK_FALSE(results[0].ok());
  CHECK(results[0].error->find("connected") != std::string::npos);

  ExperimentConfig good = small_config();
  std::vector<RunResult> mixed = run_experiment(good, 1);
  mixed.push_back(results[0]);
  const Summary s = aggregate_runs(mixed);
  CHECK(s.runs == 3);
  CHECK(s.failed == 1);
}

TEST_CASE("iteration csv is deterministic") {
  ExperimentConfig c = small_config();
  c.diagnostics.enabled = true;
  const std::string a = iteration_csv(run_seed(c, 7));
  const std::string b = iteration_csv(run_seed(c, 7));
  CHECK(a == b);
  CHECK(a.rfind("iteration,best_raw_reward,mean_raw_reward,broadcast,eval_reward,update_variance,"
                "bound_rhs,bound_holds\n", 0) == 0);
  CHECK(iteration_csv(run_seed(c, 8)) != a);

  // Diagnostics draw from no training stream, so turning them off changes
  // only the diagnostic columns.
  c.diagnostics.enabled = false;
  const RunResult plain = run_seed(c, 7);
  const RunResult diag = [&] {
    ExperimentConfig d = c;
    d.diagnostics.enabled = true;
    return run_seed(d, 7);
  }();
  REQUIRE(plain.rows.size() == diag.rows.size());
  for (std::size_t i = 0; i < plain.rows.size(); ++i) {
    CHECK(plain.rows[i].best_raw_reward == diag.rows[i].best_raw_reward);
    CHECK(plain.rows[i].eval_reward == diag.rows[i].eval_reward);
  }
}

TEST_CASE("edge list topology") {
  const fs::path dir = scratch("edges");
  fs::create_directories(dir);
  const fs::path file = dir / "g.txt";
  save_edge_list(file.string(), generate_watts_strogatz(10, 4, 0.2, 1));
  ExperimentConfig c = small_config();
  c.topology.edge_list = file.string();
  CHECK(build_topology(c, 0).same_edges(generate_watts_strogatz(10, 4, 0.2, 1)));
  c.agents = 12;
  CHECK_THROWS_AS(build_topology(c, 0), ShapeError);
  fs::remove_all(dir);
}

TEST_CASE("emit outputs") {
  const fs::path out = scratch("emit");
  ExperimentConfig a = small_config();
  ExperimentConfig b = small_config();
  b.name = "other";
  b.topology.family = Family::Complete;
  b.topology.density.reset();
  std::vector<ExperimentOutput> exps{{a, run_experiment(a, 1)}, {b, run_experiment(b, 1)}};
  const auto summaries = emit_outputs(exps, out.string());
  CHECK(summaries.size() == 2);
  const std::string summary = read_file((out / "summary.csv").string());
  CHECK(count_lines(summary) == 3);
  CHECK(summary.find("\nsmall,3,0,") != std::string::npos);
  CHECK(fs::exists(out / "small" / "seed_1.csv"));
  CHECK(fs::exists(out / "small" / "curve.svg"));
  CHECK(read_file((out / "small" / "curve.svg").string()).find("<polyline") != std::string::npos);
  const auto echoed = parse_config_text(read_file((out / "small" / "config.json").string()));
  CHECK(to_json(echoed) == to_json(a));

  const std::string first = read_file((out / "small" / "seed_1.csv").string());
  emit_outputs(exps, out.string());
  CHECK(read_file((out / "small" / "seed_1.csv").string()) == first);
  for (const auto& entry : fs::recursive_directory_iterator(out))
    CHECK(entry.path().extension() != ".tmp");
  fs::remove_all(out);
}

TEST_CASE("atomic write replaces existing content") {
  const fs::path dir = scratch("atomic");
  const fs::path file = dir / "nested" / "x.txt";
  write_file_atomic(file.string(), "first\n");
  write_file_atomic(file.string(), "second\n");
  CHECK(read_file(file.string()) == "second\n");
  CHECK_FALSE(fs::exists(file.string() + ".tmp"));
  CHECK_THROWS_AS(write_file_atomic("/proc/netes_cannot_write/x", "y"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("scatter rows") {
  const auto pts = family_scatter(30, 0.5, 50, 2);
  CHECK(count_lines(scatter_csv(pts)) == 201);
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.0) == "-2");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
