#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "netes/optimizer.hpp"
#include "netes/topology.hpp"

namespace netes {

// Trace of the across-agent covariance of the update rows, population
// (1/N) normalization.
double update_variance(const Matrix& updates);

inline constexpr std::size_t kDefaultFCap = 64;

// f(Theta, E) = sqrt( sum_{j,k,m} ((x_j - theta_m) . (x_k - theta_m))^2 ),
// x_j = theta_j + sigma eps_j. O(N^3 d); throws ResourceError above `max_agents`.
double compute_f(const Population& pop, const PerturbationSet& eps, double sigma,
                 std::size_t max_agents = kDefaultFCap);

// g(E) = (sigma^2 / N) * ||sum_i eps_i||^2.
double compute_g(const PerturbationSet& eps, double sigma);

// Degree-normalized, unit-learning-rate update over A + I:
//   u_i = (1 / (sigma^2 |ahat_i|)) sum_j ahat_ij shaped_j (x_j - theta_i).
Matrix proof_update(const Population& pop, const PerturbationSet& eps,
                    const Eigen::VectorXd& shaped, const Graph& g, double sigma);

struct BoundReport {
  double lhs_variance = 0.0;
  double rhs_bound = 0.0;
  double f_term = 0.0;
  double g_term = 0.0;
  double reach_term = 0.0;
  double homog_term = 0.0;
  bool holds = false;
};

// Var_i[u_i] <= max^2 R / (N sigma^4) * (reach * f - homog * g).
// Throws PremiseError unless min(shaped) == -max(shaped).
BoundReport variance_bound(const Population& pop, const PerturbationSet& eps,
                           const Eigen::VectorXd& shaped, const Graph& g, double sigma,
                           std::size_t max_agents = kDefaultFCap);

struct BoundSweepOptions {
  std::size_t instances = 1000;
  std::size_t min_agents = 6;   // even
  std::size_t max_agents = 40;  // even
  std::size_t max_dim = 8;
  double min_density = 0.2;
  double max_density = 0.9;
  std::uint64_t seed = 0;
  std::size_t f_cap = kDefaultFCap;
};

struct BoundSweepRow {
  std::size_t instance = 0;
  Family family = Family::Complete;
  std::size_t n = 0;
  std::size_t d = 0;
  bool mirrored = true;
  BoundReport report;
  double reachability = 0.0;
  double homogeneity = 0.0;
};

// Random instances cycling through the four families. Odd instances use
// mirrored perturbations, even ones iid draws, so the g term is exercised.
std::vector<BoundSweepRow> bound_sweep(const BoundSweepOptions& options);

// CSV: instance,family,n,d,lhs,rhs,f,g,reachability,homogeneity,holds
std::string bound_sweep_csv(const std::vector<BoundSweepRow>& rows);

}  // namespace netes
