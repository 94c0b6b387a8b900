#include "netes/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "netes/diagnostics.hpp"
#include "netes/error.hpp"
#include "netes/io.hpp"
#include "netes/metrics.hpp"
#include "netes/rng.hpp"

namespace netes {

double evaluate_policy(const Eigen::Ref<const Eigen::VectorXd>& theta, const Objective& objective,
                       std::size_t episodes) {
  if (episodes < 1) throw InvalidArgument("episodes must be >= 1");
  // Identical episodes return the value itself, avoiding rounding from the
  // sum-and-divide.
  const double first = objective.evaluate(theta);
  double total = first;
  bool identical = true;
  for (std::size_t e = 1; e < episodes; ++e) {
    const double r = objective.evaluate(theta);
    identical = identical && r == first;
    total += r;
  }
  return identical ? first : total / static_cast<double>(episodes);
}

bool detect_plateau(std::span<const double> history, std::size_t window, double threshold) {
  if (window == 0 || history.size() < 2 * window) return false;
  const auto end = history.end();
  const double now = std::accumulate(end - static_cast<std::ptrdiff_t>(window), end, 0.0) /
                     static_cast<double>(window);
  const double before = std::accumulate(end - static_cast<std::ptrdiff_t>(2 * window),
                                        end - static_cast<std::ptrdiff_t>(window), 0.0) /
                        static_cast<double>(window);
  const double change = std::abs(now - before);
  if (before == 0.0) return change <= 1e-8;
  return change <= threshold * std::abs(before);
}

Graph build_topology(const ExperimentConfig& config, std::uint64_t seed) {
  const auto& t = config.topology;
  if (t.edge_list) {
    Graph g = load_edge_list(*t.edge_list);
    if (g.size() != config.agents)
      throw ShapeError("edge list " + *t.edge_list + " has " + std::to_string(g.size()) +
                       " nodes, config has " + std::to_string(config.agents) + " agents");
    return g;
  }
  if (t.family == Family::Edgeless) return generate_edgeless(config.agents);
  const FamilyParams params =
      t.density ? matched_params(config.agents, *t.density, t.params.beta) : t.params;
  return sample_connected(t.family, config.agents, params, derive_seed(seed, {kGraphStream}),
                          t.max_attempts);
}

RunResult run_seed(const ExperimentConfig& config, std::uint64_t seed) {
  RunResult result;
  result.config_name = config.name;
  result.seed = seed;
  try {
    const Objective objective = make_objective(config.objective);
    const Graph graph = build_topology(config, seed);
    const double pairs =
        static_cast<double>(graph.size()) * static_cast<double>(graph.size() - 1) / 2.0;
    result.graph_density = static_cast<double>(graph.edge_count()) / pairs;

    Population pop = initial_population(config.agents, objective.dim(), config.init.scale,
                                        config.init.shared, seed);
    result.initial_eval = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pop.theta.rows(); ++i)
      result.initial_eval =
          std::max(result.initial_eval, evaluate_policy(pop.theta.row(i).transpose(), objective,
                                                        config.evaluation.episodes));

    Engine eval_rng(derive_seed(seed, {kEvalStream}));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool diagnose = config.diagnostics.enabled && config.agents <= config.diagnostics.max_agents;

    for (std::size_t t = 0; t < config.iterations; ++t) {
      std::optional<BoundReport> bound;
      StepObserver observer;
      if (diagnose) {
        observer = [&](const Population& before, const PerturbationSet& eps,
                       const RewardVector& rewards) {
          if (graph.family() == Family::Edgeless) return;
          bound = variance_bound(before, eps, rewards.shaped, graph, config.hyperparams.sigma,
                                 config.diagnostics.max_agents);
        };
      }
      const IterationRecord rec = step(pop, graph, config.hyperparams, objective, seed, observer);

      IterationRow row;
      row.iteration = rec.iteration;
      row.best_raw_reward = rec.best_raw;
      row.mean_raw_reward = rec.mean_raw;
      row.broadcast = rec.broadcast;
      if (!rec.broadcast) row.update_variance = update_variance(rec.updates);
      if (bound) {
        row.bound_rhs = bound->rhs_bound;
        row.bound_holds = bound->holds;
      }
      const bool last = t + 1 == config.iterations;
      const bool draw = unit(eval_rng) < config.evaluation.probability;
      // A run that never drew an evaluation gets one on its last iteration so
      // the final metric is always defined.
      if (draw || (last && result.evals.empty())) {
        const double r = evaluate_policy(pop.theta.row(static_cast<Eigen::Index>(rec.best_agent))
                                             .transpose(),
                                         objective, config.evaluation.episodes);
        row.eval_reward = r;
        result.evals.push_back(r);
      }
      result.rows.push_back(row);
      if (row.eval_reward && detect_plateau(result.evals, config.evaluation.plateau_window,
                                            config.evaluation.plateau_threshold)) {
        result.plateaued = true;
        break;
      }
    }
    if (result.evals.empty()) {
      // Plateau can only fire right after an evaluation, so this is unreachable
      // unless iterations == 0, which validation rejects.
      throw Error("run produced no evaluations");
    }
    result.final_metric = *std::max_element(result.evals.begin(), result.evals.end());
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config, std::size_t threads) {
  config.validate();
  std::vector<RunResult> results(config.seeds.size());
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, config.seeds.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i)
      results[i] = run_seed(config, config.seeds[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < config.seeds.size(); i = next++)
        results[i] = run_seed(config, config.seeds[i]);
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

Summary aggregate(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("cannot aggregate zero runs");
  Summary s;
  s.runs = values.size();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    const boost::math::students_t dist(static_cast<double>(values.size() - 1));
    const double t = boost::math::quantile(dist, 0.975);
    s.ci95_half_width = t * sd / std::sqrt(static_cast<double>(values.size()));
  }
  return s;
}

Summary aggregate_runs(const std::vector<RunResult>& results) {
  std::vector<double> finals;
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.ok()) {
      finals.push_back(r.final_metric);
    } else {
      ++failed;
    }
  }
  if (finals.empty())
    throw InvalidArgument(results.empty() ? "cannot aggregate zero runs"
                                          : "every run failed; nothing to aggregate");
  Summary s = aggregate(finals);
  s.failed = failed;
  s.config_name = results.front().config_name;
  return s;
}

std::string iteration_csv(const RunResult& r) {
  std::ostringstream out;
  out << "iteration,best_raw_reward,mean_raw_reward,broadcast,eval_reward,update_variance,"
         "bound_rhs,bound_holds\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& row : r.rows) {
    out << row.iteration << ',' << format_double(row.best_raw_reward) << ','
        << format_double(row.mean_raw_reward) << ',' << (row.broadcast ? 1 : 0) << ','
        << opt(row.eval_reward) << ',' << opt(row.update_variance) << ',' << opt(row.bound_rhs)
        << ',' << (row.bound_holds ? (*row.bound_holds ? "1" : "0") : "") << '\n';
  }
  return out.str();
}

std::string summary_csv(const std::vector<Summary>& summaries) {
  std::ostringstream out;
  out << "config,runs,failed,mean_final_metric,ci95_half_width,ci_defined\n";
  for (const auto& s : summaries) {
    out << s.config_name << ',' << s.runs << ',' << s.failed << ',' << format_double(s.mean) << ','
        << (s.ci95_half_width ? format_double(*s.ci95_half_width) : std::string()) << ','
        << (s.ci95_half_width ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string training_curve_svg(const std::string& title, const std::vector<RunResult>& results) {
  std::size_t length = 0;
  for (const auto& r : results)
    if (r.ok()) length = std::max(length, r.rows.size());

  std::vector<double> mean(length, 0.0), lo(length, 0.0), hi(length, 0.0);
  for (std::size_t t = 0; t < length; ++t) {
    std::vector<double> vals;
    for (const auto& r : results)
      if (r.ok() && t < r.rows.size()) vals.push_back(r.rows[t].best_raw_reward);
    const Summary s = aggregate(vals);
    mean[t] = s.mean;
    const double h = s.ci95_half_width.value_or(0.0);
    lo[t] = s.mean - h;
    hi[t] = s.mean + h;
  }

  constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"14\">" << title << "</text>\n";
  if (length == 0) {
    svg << "</svg>\n";
    return svg.str();
  }
  double ymin = *std::min_element(lo.begin(), lo.end());
  double ymax = *std::max_element(hi.begin(), hi.end());
  if (!(ymax > ymin)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double xspan = std::max<double>(1.0, static_cast<double>(length - 1));
  auto px = [&](std::size_t t) { return L + (W - L - R) * static_cast<double>(t) / xspan; };
  auto py = [&](double y) { return T + (H - T - B) * (ymax - y) / (ymax - ymin); };

  svg << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
  for (std::size_t t = 0; t < length; ++t) svg << format_double(px(t)) << ',' << format_double(py(hi[t])) << ' ';
  for (std::size_t t = length; t-- > 0;) svg << format_double(px(t)) << ',' << format_double(py(lo[t])) << ' ';
  svg << "\"/>\n<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t t = 0; t < length; ++t) svg << format_double(px(t)) << ',' << format_double(py(mean[t])) << ' ';
  svg << "\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L
      << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">iteration (0-"
      << length - 1 << ")</text>\n";
  svg << "<text x=\"" << L - 6 << "\" y=\"" << T + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
      << format_double(ymax) << "</text>\n";
  svg << "<text x=\"" << L - 6 << "\" y=\"" << H - B
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
      << format_double(ymin) << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

std::vector<Summary> emit_outputs(const std::vector<ExperimentOutput>& experiments,
                                  const std::string& outdir) {
  namespace fs = std::filesystem;
  std::vector<Summary> summaries;
  for (const auto& exp : experiments) {
    const fs::path dir = fs::path(outdir) / exp.config.name;
    write_file_atomic((dir / "config.json").string(), to_json(exp.config).dump(2) + "\n");
    for (const auto& r : exp.results) {
      const std::string stem = "seed_" + std::to_string(r.seed);
      if (r.ok()) {
        write_file_atomic((dir / (stem + ".csv")).string(), iteration_csv(r));
      } else {
        write_file_atomic((dir / (stem + ".error.txt")).string(), *r.error + "\n");
      }
    }
    Summary s;
    s.config_name = exp.config.name;
    bool any_ok = std::any_of(exp.results.begin(), exp.results.end(),
                              [](const RunResult& r) { return r.ok(); });
    if (any_ok) {
      s = aggregate_runs(exp.results);
      s.config_name = exp.config.name;
      write_file_atomic((dir / "curve.svg").string(),
                        training_curve_svg(exp.config.name, exp.results));
    } else {
      s.failed = exp.results.size();
      s.mean = std::numeric_limits<double>::quiet_NaN();
    }
    summaries.push_back(s);
  }
  write_file_atomic((fs::path(outdir) / "summary.csv").string(), summary_csv(summaries));
  return summaries;
}

}  // namespace netes
