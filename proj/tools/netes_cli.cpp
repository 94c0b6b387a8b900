#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netes/config.hpp"
#include "netes/diagnostics.hpp"
#include "netes/error.hpp"
#include "netes/experiment.hpp"
#include "netes/io.hpp"
#include "netes/metrics.hpp"
#include "netes/topology.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::vector<std::string>& paths, const std::vector<std::uint64_t>& seeds,
            const std::string& out, std::size_t threads, const std::vector<std::string>& presets) {
  std::vector<netes::ExperimentConfig> configs;
  for (const auto& path : paths) {
    netes::ExperimentConfig base = netes::load_config(path);
    if (!seeds.empty()) base.seeds = seeds;
    if (presets.empty()) {
      configs.push_back(base);
    } else {
      for (const auto& p : presets) configs.push_back(netes::apply_preset(base, p));
    }
  }
  const std::string outdir = out.empty() ? configs.front().output_dir : out;

  std::vector<netes::ExperimentOutput> outputs;
  int failures = 0;
  for (const auto& cfg : configs) {
    cfg.validate();
    std::cerr << "running " << cfg.name << " (" << cfg.seeds.size() << " seeds)\n";
    auto results = netes::run_experiment(cfg, threads);
    for (const auto& r : results) {
      if (!r.ok()) {
        ++failures;
        std::cerr << "  seed " << r.seed << " failed: " << *r.error << "\n";
      }
    }
    outputs.push_back({cfg, std::move(results)});
  }
  const auto summaries = netes::emit_outputs(outputs, outdir);
  for (const auto& s : summaries) {
    std::cout << s.config_name << ": mean " << netes::format_double(s.mean);
    if (s.ci95_half_width) std::cout << " +/- " << netes::format_double(*s.ci95_half_width);
    std::cout << " over " << s.runs << " runs";
    if (s.failed) std::cout << " (" << s.failed << " failed)";
    std::cout << "\n";
  }
  std::cout << "wrote " << (fs::path(outdir) / "summary.csv").string() << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_scatter(const std::string& path, const std::string& out) {
  const auto cfg = netes::load_config(path);
  const netes::ScatterSpec spec = cfg.scatter.value_or(netes::ScatterSpec{});
  const auto points = netes::family_scatter(spec.n, spec.density, spec.samples_per_family,
                                            spec.seed, cfg.topology.max_attempts,
                                            cfg.topology.params.beta);
  const std::string outdir = out.empty() ? cfg.output_dir : out;
  const auto file = fs::path(outdir) / "scatter.csv";
  netes::write_file_atomic(file.string(), netes::scatter_csv(points));
  std::cout << "wrote " << points.size() << " rows to " << file.string() << "\n";
  return 0;
}

int cmd_bound_sweep(const std::string& path, const std::string& out) {
  const auto cfg = netes::load_config(path);
  const netes::BoundSweepOptions opts = cfg.bound_sweep.value_or(netes::BoundSweepOptions{});
  const auto rows = netes::bound_sweep(opts);
  std::size_t held = 0;
  for (const auto& r : rows) held += r.report.holds ? 1 : 0;
  const std::string outdir = out.empty() ? cfg.output_dir : out;
  const auto file = fs::path(outdir) / "bound_sweep.csv";
  netes::write_file_atomic(file.string(), netes::bound_sweep_csv(rows));
  std::cout << "bound held on " << held << "/" << rows.size() << " instances; wrote "
            << file.string() << "\n";
  return held == rows.size() ? 0 : 1;
}

int cmd_graph_gen(const std::string& family, std::size_t n, double density, double p, int k,
                  double beta, int m, std::uint64_t seed, std::size_t attempts,
                  const std::string& out) {
  const netes::Family fam = netes::parse_family(family);
  netes::FamilyParams params;
  if (density >= 0.0) {
    params = netes::matched_params(n, density, beta);
  } else {
    params.p = p;
    params.k = k;
    params.beta = beta;
    params.m = m;
  }
  const netes::Graph g = fam == netes::Family::Edgeless
                             ? netes::generate_edgeless(n)
                             : netes::sample_connected(fam, n, params, seed, attempts);
  if (out.empty() || out == "-") {
    netes::write_edge_list(std::cout, g);
  } else {
    std::ostringstream buf;
    netes::write_edge_list(buf, g);
    netes::write_file_atomic(out, buf.str());
    std::cerr << "wrote " << g.edge_count() << " edges to " << out << "\n";
  }
  return 0;
}

int cmd_graph_stats(const std::string& path) {
  const netes::Graph g = netes::load_edge_list(path);
  const auto d = netes::degree_stats(g);
  std::cout << "nodes " << g.size() << "\n"
            << "edges " << g.edge_count() << "\n"
            << "min_degree " << d.min_degree << "\n"
            << "max_degree " << d.max_degree << "\n"
            << "mean_degree " << netes::format_double(d.mean_degree) << "\n"
            << "connected " << (netes::is_connected(g) ? "yes" : "no") << "\n";
  if (d.min_degree > 0) {
    const auto m = netes::topology_metrics(g);
    std::cout << "density " << netes::format_double(m.density) << "\n"
              << "reachability " << netes::format_double(m.reachability) << "\n"
              << "path_count_reachability " << netes::format_double(m.path_count_reachability)
              << "\n"
              << "homogeneity " << netes::format_double(m.homogeneity) << "\n";
  } else {
    std::cout << "reachability undefined (isolated node)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Networked evolution strategies"};
  app.require_subcommand(1);

  std::vector<std::uint64_t> seeds;
  std::string out;
  std::size_t threads = 1;
  std::vector<std::string> presets;

  auto* run = app.add_subcommand("run", "Run one or more experiment configs");
  std::vector<std::string> run_paths;
  run->add_option("configs", run_paths, "Config JSON files")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", seeds, "Override the config's seed list");
  run->add_option("--out", out, "Output directory (default: config output_dir)");
  run->add_option("--threads", threads, "Parallel seed workers")->check(CLI::PositiveNumber);
  run->add_option("--preset", presets, "Ablation preset(s) to apply")
      ->check(CLI::IsMember(std::vector<std::string>(std::begin(netes::kPresetNames),
                                                     std::end(netes::kPresetNames))));

  auto* scatter = app.add_subcommand("scatter", "Reachability/homogeneity sweep over families");
  std::string scatter_path;
  scatter->add_option("config", scatter_path)->required()->check(CLI::ExistingFile);
  scatter->add_option("--out", out);

  auto* sweep = app.add_subcommand("bound-sweep", "Check the update-variance bound on random instances");
  std::string sweep_path;
  sweep->add_option("config", sweep_path)->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out);

  auto* graph = app.add_subcommand("graph", "Generate or inspect graphs");
  graph->require_subcommand(1);
  auto* gen = graph->add_subcommand("gen", "Sample a connected graph and print its edge list");
  std::string family = "erdos_renyi";
  std::size_t n = 100;
  double density = -1.0, p = 0.5, beta = 0.1;
  int k = 2, m = 1;
  std::uint64_t seed = 0;
  std::size_t attempts = 1000;
  gen->add_option("--family", family);
  gen->add_option("--n", n)->check(CLI::PositiveNumber);
  gen->add_option("--density", density, "Match this density (overrides p/k/m)");
  gen->add_option("--p", p);
  gen->add_option("--k", k);
  gen->add_option("--beta", beta);
  gen->add_option("--m", m);
  gen->add_option("--seed", seed);
  gen->add_option("--max-attempts", attempts);
  gen->add_option("--out", out, "Edge-list file (default: stdout)");
  auto* stats = graph->add_subcommand("stats", "Print degree statistics and metrics");
  std::string stats_path;
  stats->add_option("edge_list", stats_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_paths, seeds, out, threads, presets);
    if (*scatter) return cmd_scatter(scatter_path, out);
    if (*sweep) return cmd_bound_sweep(sweep_path, out);
    if (*gen) return cmd_graph_gen(family, n, density, p, k, beta, m, seed, attempts, out);
    if (*stats) return cmd_graph_stats(stats_path);
  } catch (const netes::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
