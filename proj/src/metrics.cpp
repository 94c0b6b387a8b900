#include "netes/metrics.hpp"

#include <cmath>
#include <sstream>

#include "netes/error.hpp"
#include "netes/io.hpp"
#include "netes/rng.hpp"

namespace netes {

namespace {

double min_degree_checked(const Graph& g) {
  const auto stats = degree_stats(g);
  if (stats.min_degree == 0)
    throw UndefinedMetric("metric undefined: graph has an isolated node (min degree 0)");
  return static_cast<double>(stats.min_degree);
}

void require_er_domain(std::size_t n, double p) {
  if (n < 2) throw InvalidArgument("n must be >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must be in (0, 1]");
}

}  // namespace

double reachability(const Graph& g) {
  const double kmin = min_degree_checked(g);
  const Eigen::MatrixXd a = g.adjacency();
  const Eigen::MatrixXd a2 = a * a;
  return a2.norm() / (kmin * kmin);
}

double path_count_reachability(const Graph& g) {
  const auto stats = degree_stats(g);
  if (stats.min_degree == 0)
    throw UndefinedMetric("metric undefined: graph has an isolated node (min degree 0)");
  // sum_ij (A^2)_ij = sum_l |A_l|^2 for symmetric 0/1 A.
  double walks = 0.0;
  for (std::size_t d : stats.degrees) walks += static_cast<double>(d) * static_cast<double>(d);
  const double kmin = static_cast<double>(stats.min_degree);
  return std::sqrt(walks) / (kmin * kmin);
}

double squared_ratio_reachability(const Graph& g) {
  const double kmin = min_degree_checked(g);
  const Eigen::MatrixXd a = g.adjacency();
  const double r = (a * a).norm() / kmin;
  return r * r;
}

double homogeneity(const Graph& g) {
  const auto stats = degree_stats(g);
  if (stats.min_degree == 0)
    throw UndefinedMetric("metric undefined: graph has an isolated node (min degree 0)");
  const double r = static_cast<double>(stats.min_degree) / static_cast<double>(stats.max_degree);
  return r * r;
}

TopologyMetrics topology_metrics(const Graph& g) {
  TopologyMetrics m;
  m.reachability = reachability(g);
  m.path_count_reachability = path_count_reachability(g);
  m.homogeneity = homogeneity(g);
  m.n = g.size();
  const double pairs = static_cast<double>(g.size()) * static_cast<double>(g.size() - 1) / 2.0;
  m.density = static_cast<double>(g.edge_count()) / pairs;
  return m;
}

double approx_reachability_er(std::size_t n, double p, ReachabilityApprox form) {
  require_er_domain(n, p);
  const double nd = static_cast<double>(n);
  switch (form) {
    case ReachabilityApprox::LargeN: return 1.0 / (p * std::sqrt(nd));
    case ReachabilityApprox::RootPn: return 1.0 / std::sqrt(p * nd);
    case ReachabilityApprox::Full: break;
  }
  const double mean = p * (nd - 1.0);
  const double kmin = mean - 2.0 * std::sqrt(mean * (1.0 - p));
  if (!(kmin > 0.0))
    throw DomainError("Erdos-Renyi reachability approximation needs p(n-1) > 2 sqrt(p(n-1)(1-p))");
  return std::sqrt(p * p * nd * nd * nd) / (kmin * kmin);
}

HomogeneityEstimate approx_homogeneity_er(std::size_t n, double p, HomogeneityApprox form) {
  require_er_domain(n, p);
  const double nd = static_cast<double>(n);
  HomogeneityEstimate est;
  if (form == HomogeneityApprox::Shorthand) {
    est.value = 1.0 - 8.0 * std::sqrt((1.0 - p) / (nd * p));
  } else {
    const double mean = p * (nd - 1.0);
    const double spread = 2.0 * std::sqrt(mean * (1.0 - p));
    const double lo = mean - spread;
    if (lo < 0.0) {
      est.value = 0.0;
      est.clamped = true;
      return est;
    }
    const double r = lo / (mean + spread);
    est.value = r * r;
  }
  if (est.value < 0.0) {
    est.value = 0.0;
    est.clamped = true;
  }
  return est;
}

std::vector<ScatterPoint> family_scatter(std::size_t n, double density,
                                         std::size_t samples_per_family, std::uint64_t seed,
                                         std::size_t max_attempts, double beta) {
  if (samples_per_family < 1) throw InvalidArgument("samples_per_family must be >= 1");
  const FamilyParams params = matched_params(n, density, beta);
  const Family families[] = {Family::Complete, Family::ErdosRenyi, Family::SmallWorld,
                             Family::ScaleFree};
  std::vector<ScatterPoint> points;
  points.reserve(4 * samples_per_family);
  for (Family f : families) {
    for (std::size_t s = 0; s < samples_per_family; ++s) {
      // Attempts advance the seed by one, so space samples far apart.
      const std::uint64_t sample_seed =
          derive_seed(seed, {kGraphStream, static_cast<std::uint64_t>(f), s});
      const Graph g = sample_connected(f, n, params, sample_seed, max_attempts);
      const TopologyMetrics m = topology_metrics(g);
      points.push_back({f, g.seed(), n, density, m.reachability, m.homogeneity,
                        m.path_count_reachability});
    }
  }
  return points;
}

std::string scatter_csv(const std::vector<ScatterPoint>& points) {
  std::ostringstream out;
  out << "family,seed,n,density,reachability,homogeneity\n";
  for (const auto& p : points) {
    out << family_name(p.family) << ',' << p.seed << ',' << p.n << ',' << format_double(p.density)
        << ',' << format_double(p.reachability) << ',' << format_double(p.homogeneity) << '\n';
  }
  return out.str();
}

}  // namespace netes
