#include "netes/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

#include "netes/error.hpp"
#include "netes/io.hpp"
#include "netes/rng.hpp"

namespace netes {

namespace {

constexpr std::string_view kFamilyNames[] = {"complete", "erdos_renyi", "small_world",
                                             "scale_free", "edgeless"};

void require_size(std::size_t n) {
  if (n < 2) throw InvalidArgument("graph needs at least 2 nodes, got " + std::to_string(n));
}

double uniform01(Engine& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t uniform_index(Engine& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

std::string_view family_name(Family f) { return kFamilyNames[static_cast<int>(f)]; }

Family parse_family(std::string_view name) {
  for (int i = 0; i < 5; ++i)
    if (kFamilyNames[i] == name) return static_cast<Family>(i);
  std::string valid;
  for (auto n : kFamilyNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw InvalidArgument("unknown graph family '" + std::string(name) + "' (valid: " + valid + ")");
}

FamilyParams matched_params(std::size_t n, double density, double beta) {
  require_size(n);
  if (!(density > 0.0 && density <= 1.0))
    throw InvalidArgument("density must be in (0, 1], got " + format_double(density));
  FamilyParams fp;
  fp.p = density;
  fp.beta = beta;

  long k = std::lround(density * static_cast<double>(n - 1));
  if (k % 2 != 0) k = (k + 1 < static_cast<long>(n)) ? k + 1 : k - 1;
  fp.k = static_cast<int>(std::max(2L, k));

  const double budget = density * static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  int m = 1;
  for (std::size_t c = 1; c < n; ++c) {
    const double edges = static_cast<double>(c) * static_cast<double>(c - 1) / 2.0 +
                         static_cast<double>(c) * static_cast<double>(n - c);
    if (edges <= budget) m = static_cast<int>(c);
  }
  fp.m = m;
  return fp;
}

Graph::Graph(std::size_t n, Family family, FamilyParams params, std::uint64_t seed)
    : n_(n), family_(family), params_(params), seed_(seed), adj_(n * n, 0) {}

std::size_t Graph::degree(std::size_t i) const {
  const auto* row = adj_.data() + i * n_;
  return static_cast<std::size_t>(std::count(row, row + n_, std::uint8_t{1}));
}

std::size_t Graph::edge_count() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1})) / 2;
}

std::vector<std::size_t> Graph::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j)
    if (adj_[i * n_ + j]) out.push_back(j);
  return out;
}

Eigen::MatrixXd Graph::adjacency() const {
  Eigen::MatrixXd a(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = adj_[i * n_ + j];
  return a;
}

bool Graph::same_edges(const Graph& other) const { return n_ == other.n_ && adj_ == other.adj_; }

void Graph::add_edge(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_) throw InvalidArgument("edge endpoint out of range");
  if (i == j) throw InvalidArgument("self-loops are not allowed");
  adj_[i * n_ + j] = 1;
  adj_[j * n_ + i] = 1;
}

void Graph::remove_edge(std::size_t i, std::size_t j) {
  adj_[i * n_ + j] = 0;
  adj_[j * n_ + i] = 0;
}

Graph generate_complete(std::size_t n) {
  require_size(n);
  Graph g(n, Family::Complete, FamilyParams{}, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph generate_edgeless(std::size_t n) {
  require_size(n);
  return Graph(n, Family::Edgeless, FamilyParams{}, 0);
}

Graph generate_erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  require_size(n);
  if (!(p > 0.0 && p <= 1.0))
    throw InvalidArgument("Erdos-Renyi p must be in (0, 1], got " + format_double(p));
  FamilyParams fp;
  fp.p = p;
  Graph g(n, Family::ErdosRenyi, fp, seed);
  Engine rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < p) g.add_edge(i, j);
  return g;
}

Graph generate_watts_strogatz(std::size_t n, int k, double beta, std::uint64_t seed) {
  require_size(n);
  if (k <= 0 || k % 2 != 0 || static_cast<std::size_t>(k) >= n)
    throw InvalidArgument("Watts-Strogatz k must be even with 0 < k < n, got k=" +
                          std::to_string(k) + " n=" + std::to_string(n));
  if (!(beta >= 0.0 && beta <= 1.0))
    throw InvalidArgument("Watts-Strogatz beta must be in [0, 1], got " + format_double(beta));
  FamilyParams fp;
  fp.k = k;
  fp.beta = beta;
  Graph g(n, Family::SmallWorld, fp, seed);
  const std::size_t half = static_cast<std::size_t>(k / 2);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t j = 1; j <= half; ++j) g.add_edge(u, (u + j) % n);

  // Rewire the far endpoint of each lattice edge, one offset ring at a time.
  Engine rng(seed);
  for (std::size_t j = 1; j <= half; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t v = (u + j) % n;
      if (uniform01(rng) >= beta) continue;
      if (!g.has_edge(u, v) || g.degree(u) >= n - 1) continue;
      std::size_t w = uniform_index(rng, n);
      while (w == u || g.has_edge(u, w)) w = uniform_index(rng, n);
      g.remove_edge(u, v);
      g.add_edge(u, w);
    }
  }
  return g;
}

Graph generate_barabasi_albert(std::size_t n, int m, std::uint64_t seed) {
  require_size(n);
  if (m < 1 || static_cast<std::size_t>(m) >= n)
    throw InvalidArgument("Barabasi-Albert m must satisfy 1 <= m < n, got m=" +
                          std::to_string(m) + " n=" + std::to_string(n));
  FamilyParams fp;
  fp.m = m;
  Graph g(n, Family::ScaleFree, fp, seed);
  const auto mm = static_cast<std::size_t>(m);
  for (std::size_t i = 0; i < mm; ++i)
    for (std::size_t j = i + 1; j < mm; ++j) g.add_edge(i, j);

  // Each endpoint appears once per incident edge, so a uniform draw from
  // `endpoints` is a degree-proportional draw.
  std::vector<std::size_t> endpoints;
  for (std::size_t i = 0; i < mm; ++i)
    for (std::size_t j = 0; j < mm - 1; ++j) endpoints.push_back(i);

  Engine rng(seed);
  std::vector<std::size_t> chosen;
  for (std::size_t v = mm; v < n; ++v) {
    chosen.clear();
    while (chosen.size() < mm) {
      // Only reachable for m = 1 on the first step: the seed node has degree 0.
      const std::size_t t = endpoints.empty() ? uniform_index(rng, v)
                                              : endpoints[uniform_index(rng, endpoints.size())];
      if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) chosen.push_back(t);
    }
    for (std::size_t t : chosen) {
      g.add_edge(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return g;
}

Graph generate(Family family, std::size_t n, const FamilyParams& params, std::uint64_t seed) {
  switch (family) {
    case Family::Complete: return generate_complete(n);
    case Family::ErdosRenyi: return generate_erdos_renyi(n, params.p, seed);
    case Family::SmallWorld: return generate_watts_strogatz(n, params.k, params.beta, seed);
    case Family::ScaleFree: return generate_barabasi_albert(n, params.m, seed);
    case Family::Edgeless: return generate_edgeless(n);
  }
  throw InvalidArgument("unknown family");
}

Graph sample_connected(Family family, std::size_t n, const FamilyParams& params,
                       std::uint64_t seed, std::size_t max_attempts) {
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be >= 1");
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Graph g = generate(family, n, params, seed + attempt);
    if (is_connected(g)) return g;
  }
  throw ExhaustionError("no connected " + std::string(family_name(family)) + " graph in " +
                            std::to_string(max_attempts) + " attempts",
                        max_attempts);
}

bool is_connected(const Graph& g) {
  const std::size_t n = g.size();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v = 0; v < n; ++v) {
      if (!seen[v] && g.has_edge(u, v)) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

DegreeStats degree_stats(const Graph& g) {
  DegreeStats s;
  s.degrees.reserve(g.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    s.degrees.push_back(g.degree(i));
    total += s.degrees.back();
  }
  const auto [lo, hi] = std::minmax_element(s.degrees.begin(), s.degrees.end());
  s.min_degree = *lo;
  s.max_degree = *hi;
  s.mean_degree = static_cast<double>(total) / static_cast<double>(g.size());
  return s;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# netes-graph n=" << g.size() << " family=" << family_name(g.family())
      << " seed=" << g.seed() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g.has_edge(i, j)) out << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("edge list is empty");
  std::istringstream header(line);
  std::string hash, tag, n_field, family_field, seed_field;
  header >> hash >> tag >> n_field >> family_field >> seed_field;
  auto value_of = [](const std::string& field, std::string_view key) {
    if (field.rfind(key, 0) != 0)
      throw InvalidArgument("malformed edge-list header field '" + field + "'");
    return field.substr(key.size());
  };
  if (hash != "#" || tag != "netes-graph")
    throw InvalidArgument("edge list must start with '# netes-graph'");
  std::size_t n = 0;
  std::uint64_t seed = 0;
  try {
    n = std::stoul(value_of(n_field, "n="));
    seed = std::stoull(value_of(seed_field, "seed="));
  } catch (const std::logic_error&) {
    throw InvalidArgument("malformed edge-list header: " + line);
  }
  const Family family = parse_family(value_of(family_field, "family="));
  require_size(n);
  Graph g(n, family, FamilyParams{}, seed);

  std::size_t line_no = 1;
  long prev_i = -1, prev_j = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    long i = -1, j = -1;
    std::string rest;
    if (!(row >> i >> j) || (row >> rest))
      throw InvalidArgument("edge list line " + std::to_string(line_no) + ": expected 'i j'");
    if (i < 0 || j < 0 || i >= j || static_cast<std::size_t>(j) >= n)
      throw InvalidArgument("edge list line " + std::to_string(line_no) +
                            ": need 0 <= i < j < n");
    if (i < prev_i || (i == prev_i && j <= prev_j))
      throw InvalidArgument("edge list line " + std::to_string(line_no) +
                            ": edges must be sorted and unique");
    prev_i = i;
    prev_j = j;
    g.add_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return g;
}

void save_edge_list(const std::string& path, const Graph& g) {
  std::ostringstream ss;
  write_edge_list(ss, g);
  write_file_atomic(path, ss.str());
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open edge list");
  return read_edge_list(in);
}

}  // namespace netes
