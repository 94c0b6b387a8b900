#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include <Eigen/Core>

#include "netes/objectives.hpp"
#include "netes/topology.hpp"

namespace netes {

// Row i belongs to agent i.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Population {
  Matrix theta;
  std::uint64_t iteration = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(theta.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(theta.cols()); }
};

// Agent i draws its own N(0, init_scale^2 I) vector from a per-agent stream.
// With `shared`, every agent gets agent 0's draw.
Population initial_population(std::size_t agents, std::size_t dim, double init_scale, bool shared,
                              std::uint64_t master_seed);

// Mirrored Gaussian perturbations: row 2k+1 is exactly -row 2k.
struct PerturbationSet {
  Matrix epsilon;

  std::size_t size() const noexcept { return static_cast<std::size_t>(epsilon.rows()); }
  // theta_i + sigma * eps_i for every agent.
  Matrix candidates(const Population& pop, double sigma) const;
};

enum class BroadcastSource {
  Candidate,   // copy theta_best + sigma * eps_best
  Parameters,  // copy theta_best as held before perturbation
};

struct ESHyperparams {
  double alpha = 0.01;
  double sigma = 0.02;
  double broadcast_probability = 0.8;
  double weight_decay = 0.005;
  bool degree_normalize = false;
  BroadcastSource broadcast_source = BroadcastSource::Candidate;

  // Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct RewardVector {
  Eigen::VectorXd raw;
  Eigen::VectorXd shaped;
};

// Pair k (rows 2k, 2k+1) is drawn from the stream keyed by
// (master_seed, iteration, agent 2k). Throws InvalidArgument for odd N.
PerturbationSet perturb(const Population& pop, double sigma, std::uint64_t master_seed);

// Centered ranks: shaped_i = rank_i / (N - 1) - 0.5, rank 0 = worst return,
// ties broken by agent index (lower index ranks lower).
Eigen::VectorXd shape_fitness(std::span<const double> raw);
inline Eigen::VectorXd shape_fitness(const Eigen::VectorXd& raw) {
  return shape_fitness(std::span<const double>(raw.data(), static_cast<std::size_t>(raw.size())));
}

// u_i = c_i * sum_j ahat_ij * shaped_j * (theta_j + sigma eps_j - theta_i), with
// ahat = A + I and c_i = alpha / (N sigma^2), or alpha / (|ahat_i| sigma^2)
// when hp.degree_normalize is set. Does not modify `pop`.
Matrix compute_update(const Population& pop, const PerturbationSet& eps,
                      const Eigen::VectorXd& shaped, const Graph& g, const ESHyperparams& hp);

struct BroadcastOutcome {
  bool happened = false;
  std::optional<std::size_t> source;
};

// Index of the highest raw reward; the lowest index wins ties.
std::size_t best_agent(std::span<const double> raw);

// Deterministic uniform draw for iteration `iteration`'s broadcast decision.
double broadcast_draw(std::uint64_t master_seed, std::uint64_t iteration);

// If draw < p_b, overwrite every row of `pop.theta` with the best agent's row of
// `source_rows` (the candidates or the pre-perturbation parameters).
BroadcastOutcome apply_broadcast(Population& pop, const Matrix& source_rows,
                                 std::span<const double> raw, double p_b, double draw);
BroadcastOutcome apply_broadcast(Population& pop, const Matrix& source_rows,
                                 std::span<const double> raw, double p_b,
                                 std::uint64_t master_seed);

struct IterationRecord {
  std::uint64_t iteration = 0;
  Eigen::VectorXd raw;
  double best_raw = 0.0;
  double mean_raw = 0.0;
  std::size_t best_agent = 0;
  bool broadcast = false;
  std::optional<std::size_t> broadcast_source;
  Matrix updates;  // empty on broadcast iterations
};

// Called once per step with the pre-update state, before broadcast or update.
using StepObserver = std::function<void(const Population& before, const PerturbationSet& eps,
                                        const RewardVector& rewards)>;

// One iteration: perturb, evaluate candidates, then broadcast or apply the
// networked update followed by weight decay.
IterationRecord step(Population& pop, const Graph& g, const ESHyperparams& hp,
                     const Objective& objective, std::uint64_t master_seed,
                     const StepObserver& observer = {});

}  // namespace netes
