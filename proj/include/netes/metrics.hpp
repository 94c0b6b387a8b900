#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "netes/topology.hpp"

namespace netes {

// Reachability and homogeneity of a topology, computed on the simple graph
// (zero diagonal). The optimizer's forced self-loops are not included.
struct TopologyMetrics {
  double reachability = 0.0;             // ||A^2||_F / (min degree)^2
  double path_count_reachability = 0.0;  // sqrt(sum_ij (A^2)_ij) / (min degree)^2
  double homogeneity = 0.0;              // (min degree / max degree)^2
  std::size_t n = 0;
  double density = 0.0;
};

// ||A^2||_F / (min_l |A_l|)^2. Throws UndefinedMetric if min degree is 0.
double reachability(const Graph& g);

// Same ratio with the numerator taken as the square root of the total number
// of length-2 walks, sqrt(sum_ij (A^2)_ij) = sqrt(sum_l |A_l|^2). This is the
// quantity the Erdos-Renyi closed form below approximates.
double path_count_reachability(const Graph& g);

// Squared variant (||A^2||_F / min_l |A_l|)^2, kept for comparison only.
double squared_ratio_reachability(const Graph& g);

double homogeneity(const Graph& g);

TopologyMetrics topology_metrics(const Graph& g);

enum class ReachabilityApprox {
  Full,    // sqrt(p^2 n^3) / [p(n-1) - 2 sqrt(p(n-1)(1-p))]^2
  LargeN,  // 1 / (p sqrt(n))
  RootPn,  // (p n)^(-1/2)
};

// Throws DomainError when the Full denominator base is not positive.
double approx_reachability_er(std::size_t n, double p,
                              ReachabilityApprox form = ReachabilityApprox::Full);

enum class HomogeneityApprox {
  Ratio,      // ((mu - 2 s) / (mu + 2 s))^2, mu = p(n-1), s = sqrt(p(n-1)(1-p))
  Shorthand,  // 1 - 8 sqrt((1-p)/(np))
};

struct HomogeneityEstimate {
  double value = 0.0;
  bool clamped = false;  // value was negative (or numerator was) and got clamped to 0
};

HomogeneityEstimate approx_homogeneity_er(std::size_t n, double p,
                                          HomogeneityApprox form = HomogeneityApprox::Ratio);

struct ScatterPoint {
  Family family;
  std::uint64_t seed;
  std::size_t n;
  double density;
  double reachability;
  double homogeneity;
  double path_count_reachability;
};

// Samples `samples_per_family` connected graphs from each of the four
// families at matched density and measures each one.
std::vector<ScatterPoint> family_scatter(std::size_t n, double density,
                                         std::size_t samples_per_family, std::uint64_t seed,
                                         std::size_t max_attempts = 1000, double beta = 0.1);

// CSV with header family,seed,n,density,reachability,homogeneity.
std::string scatter_csv(const std::vector<ScatterPoint>& points);

}  // namespace netes
