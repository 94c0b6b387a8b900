#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace netes {

enum class Family { Complete, ErdosRenyi, SmallWorld, ScaleFree, Edgeless };

std::string_view family_name(Family f);
// Accepts the names produced by family_name(); throws InvalidArgument
// listing the valid names otherwise.
Family parse_family(std::string_view name);

// Generator parameters. Only the fields relevant to a family are read.
struct FamilyParams {
  double p = 0.5;      // Erdos-Renyi edge probability
  int k = 2;           // Watts-Strogatz ring degree (even)
  double beta = 0.1;   // Watts-Strogatz rewiring probability
  int m = 1;           // Barabasi-Albert attachment count
};

// Family parameters whose edge budget matches `density` at size n:
// p = density, k = round(density*(n-1)) forced even, m = the largest m with
// m(m-1)/2 + m(n-m) <= density*n(n-1)/2 (at least 1).
FamilyParams matched_params(std::size_t n, double density, double beta = 0.1);

// Undirected simple graph on n nodes, dense symmetric adjacency with zero
// diagonal. Immutable once built.
class Graph {
 public:
  Graph(std::size_t n, Family family, FamilyParams params, std::uint64_t seed);

  std::size_t size() const noexcept { return n_; }
  Family family() const noexcept { return family_; }
  const FamilyParams& params() const noexcept { return params_; }
  std::uint64_t seed() const noexcept { return seed_; }

  bool has_edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
  std::size_t degree(std::size_t i) const;
  std::size_t edge_count() const;
  std::vector<std::size_t> neighbors(std::size_t i) const;

  // A as a dense double matrix (zero diagonal).
  Eigen::MatrixXd adjacency() const;

  // Adjacency bits only; provenance is ignored.
  bool same_edges(const Graph& other) const;

  // Mutators used by generators and the edge-list reader.
  void add_edge(std::size_t i, std::size_t j);
  void remove_edge(std::size_t i, std::size_t j);

 private:
  std::size_t n_;
  Family family_;
  FamilyParams params_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> adj_;
};

struct DegreeStats {
  std::size_t min_degree = 0;
  std::size_t max_degree = 0;
  double mean_degree = 0.0;
  std::vector<std::size_t> degrees;
};

Graph generate_complete(std::size_t n);
Graph generate_erdos_renyi(std::size_t n, double p, std::uint64_t seed);
Graph generate_watts_strogatz(std::size_t n, int k, double beta, std::uint64_t seed);
Graph generate_barabasi_albert(std::size_t n, int m, std::uint64_t seed);
// No edges at all; agents only hear themselves. Used by the broadcast-only control.
Graph generate_edgeless(std::size_t n);

Graph generate(Family family, std::size_t n, const FamilyParams& params, std::uint64_t seed);

// Retries generation with seed, seed+1, ... until the graph is connected.
Graph sample_connected(Family family, std::size_t n, const FamilyParams& params,
                       std::uint64_t seed, std::size_t max_attempts);

bool is_connected(const Graph& g);
DegreeStats degree_stats(const Graph& g);

// Edge-list text format:
//   # netes-graph n=<n> family=<f> seed=<s>
//   i j        (0-indexed, i < j, lexicographic order)
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const Graph& g);
Graph load_edge_list(const std::string& path);

}  // namespace netes
