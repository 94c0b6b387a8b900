#include "netes/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "netes/error.hpp"
#include "netes/rng.hpp"

namespace netes {

Population initial_population(std::size_t agents, std::size_t dim, double init_scale, bool shared,
                              std::uint64_t master_seed) {
  if (agents < 2) throw InvalidArgument("population needs at least 2 agents");
  if (dim < 1) throw InvalidArgument("parameter dimension must be >= 1");
  if (!(init_scale >= 0.0)) throw InvalidArgument("init_scale must be >= 0");
  Population pop;
  pop.theta.resize(static_cast<Eigen::Index>(agents), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < agents; ++i) {
    Engine rng(derive_seed(master_seed, {kInitStream, shared ? 0 : i}));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t c = 0; c < dim; ++c)
      pop.theta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          init_scale * normal(rng);
  }
  return pop;
}

Matrix PerturbationSet::candidates(const Population& pop, double sigma) const {
  if (epsilon.rows() != pop.theta.rows() || epsilon.cols() != pop.theta.cols())
    throw ShapeError("perturbations do not match the population shape");
  return pop.theta + sigma * epsilon;
}

void ESHyperparams::validate() const {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  if (!(broadcast_probability >= 0.0 && broadcast_probability <= 1.0))
    throw InvalidArgument("broadcast_probability must be in [0, 1]");
  if (!(weight_decay >= 0.0 && weight_decay < 1.0))
    throw InvalidArgument("weight_decay must be in [0, 1)");
}

PerturbationSet perturb(const Population& pop, double sigma, std::uint64_t master_seed) {
  const std::size_t n = pop.size();
  if (n % 2 != 0)
    throw InvalidArgument("mirrored sampling needs an even agent count, got " + std::to_string(n));
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  PerturbationSet out;
  out.epsilon.resize(pop.theta.rows(), pop.theta.cols());
  for (std::size_t k = 0; k < n / 2; ++k) {
    Engine rng(derive_seed(master_seed, {kPerturbStream, pop.iteration, 2 * k}));
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto r = static_cast<Eigen::Index>(2 * k);
    for (Eigen::Index c = 0; c < out.epsilon.cols(); ++c) {
      const double e = normal(rng);
      out.epsilon(r, c) = e;
      out.epsilon(r + 1, c) = -e;
    }
  }
  return out;
}

Eigen::VectorXd shape_fitness(std::span<const double> raw) {
  const std::size_t n = raw.size();
  if (n < 2) throw InvalidArgument("fitness shaping needs at least 2 returns");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  Eigen::VectorXd shaped(static_cast<Eigen::Index>(n));
  const double denom = static_cast<double>(n - 1);
  for (std::size_t rank = 0; rank < n; ++rank)
    shaped(static_cast<Eigen::Index>(order[rank])) = static_cast<double>(rank) / denom - 0.5;
  return shaped;
}

Matrix compute_update(const Population& pop, const PerturbationSet& eps,
                      const Eigen::VectorXd& shaped, const Graph& g, const ESHyperparams& hp) {
  const auto n = pop.theta.rows();
  const auto d = pop.theta.cols();
  if (eps.epsilon.rows() != n || eps.epsilon.cols() != d)
    throw ShapeError("perturbation matrix does not match the population");
  if (shaped.size() != n) throw ShapeError("reward vector length does not match the population");
  if (g.size() != static_cast<std::size_t>(n))
    throw ShapeError("graph has " + std::to_string(g.size()) + " nodes but the population has " +
                     std::to_string(n) + " agents");
  if (!shaped.allFinite()) throw NumericError("non-finite shaped reward");

  const Matrix cand = eps.candidates(pop, hp.sigma);
  const double sigma2 = hp.sigma * hp.sigma;
  Matrix u = Matrix::Zero(n, d);
  Eigen::RowVectorXd acc(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    acc.setZero();
    std::size_t neighborhood = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && !g.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))
        continue;
      ++neighborhood;
      acc += shaped(j) * (cand.row(j) - pop.theta.row(i));
    }
    const double scale = hp.degree_normalize ? static_cast<double>(neighborhood)
                                             : static_cast<double>(n);
    u.row(i) = (hp.alpha / (scale * sigma2)) * acc;
  }
  return u;
}

std::size_t best_agent(std::span<const double> raw) {
  if (raw.empty()) throw InvalidArgument("no rewards");
  std::size_t best = 0;
  for (std::size_t i = 1; i < raw.size(); ++i)
    if (raw[i] > raw[best]) best = i;
  return best;
}

double broadcast_draw(std::uint64_t master_seed, std::uint64_t iteration) {
  Engine rng(derive_seed(master_seed, {kBroadcastStream, iteration}));
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

BroadcastOutcome apply_broadcast(Population& pop, const Matrix& source_rows,
                                 std::span<const double> raw, double p_b, double draw) {
  if (raw.size() != pop.size() || source_rows.rows() != pop.theta.rows() ||
      source_rows.cols() != pop.theta.cols())
    throw ShapeError("broadcast inputs do not match the population");
  BroadcastOutcome out;
  if (!(draw < p_b)) return out;
  const std::size_t b = best_agent(raw);
  const Eigen::RowVectorXd winner = source_rows.row(static_cast<Eigen::Index>(b));
  pop.theta.rowwise() = winner;
  out.happened = true;
  out.source = b;
  return out;
}

BroadcastOutcome apply_broadcast(Population& pop, const Matrix& source_rows,
                                 std::span<const double> raw, double p_b,
                                 std::uint64_t master_seed) {
  return apply_broadcast(pop, source_rows, raw, p_b, broadcast_draw(master_seed, pop.iteration));
}

IterationRecord step(Population& pop, const Graph& g, const ESHyperparams& hp,
                     const Objective& objective, std::uint64_t master_seed,
                     const StepObserver& observer) {
  hp.validate();
  if (g.size() != pop.size()) throw ShapeError("graph and population sizes differ");
  if (objective.dim() != pop.dim()) throw ShapeError("objective and population dimensions differ");

  const PerturbationSet eps = perturb(pop, hp.sigma, master_seed);
  const Matrix cand = eps.candidates(pop, hp.sigma);

  IterationRecord rec;
  rec.iteration = pop.iteration;
  RewardVector rewards;
  rewards.raw.resize(cand.rows());
  for (Eigen::Index i = 0; i < cand.rows(); ++i) {
    const Eigen::VectorXd row = cand.row(i).transpose();
    rewards.raw(i) = objective.evaluate(row);
  }
  if (!rewards.raw.allFinite()) throw NumericError("objective returned a non-finite reward");
  rewards.shaped = shape_fitness(rewards.raw);

  const std::span<const double> raw(rewards.raw.data(), static_cast<std::size_t>(rewards.raw.size()));
  rec.raw = rewards.raw;
  rec.best_agent = best_agent(raw);
  rec.best_raw = rewards.raw(static_cast<Eigen::Index>(rec.best_agent));
  rec.mean_raw = rewards.raw.mean();

  if (observer) observer(pop, eps, rewards);

  const Matrix& source = hp.broadcast_source == BroadcastSource::Candidate ? cand : pop.theta;
  // apply_broadcast may overwrite pop.theta, which `source` can alias; copy first.
  const Matrix source_copy = source;
  const BroadcastOutcome b =
      apply_broadcast(pop, source_copy, raw, hp.broadcast_probability, master_seed);
  rec.broadcast = b.happened;
  rec.broadcast_source = b.source;
  if (!b.happened) {
    rec.updates = compute_update(pop, eps, rewards.shaped, g, hp);
    pop.theta += rec.updates;
    pop.theta *= (1.0 - hp.weight_decay);
  }
  ++pop.iteration;
  return rec;
}

}  // namespace netes
