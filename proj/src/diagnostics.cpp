#include "netes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "netes/error.hpp"
#include "netes/io.hpp"
#include "netes/metrics.hpp"
#include "netes/objectives.hpp"
#include "netes/rng.hpp"

namespace netes {

double update_variance(const Matrix& updates) {
  const auto n = updates.rows();
  if (n < 2) throw InvalidArgument("update variance needs at least 2 agents");
  const Eigen::RowVectorXd mean = updates.colwise().mean();
  return (updates.rowwise() - mean).squaredNorm() / static_cast<double>(n);
}

double compute_f(const Population& pop, const PerturbationSet& eps, double sigma,
                 std::size_t max_agents) {
  const std::size_t n = pop.size();
  if (n > max_agents)
    throw ResourceError("f term is O(N^3 d); N=" + std::to_string(n) + " exceeds cap " +
                        std::to_string(max_agents));
  const Matrix cand = eps.candidates(pop, sigma);
  double total = 0.0;
  for (Eigen::Index m = 0; m < pop.theta.rows(); ++m) {
    const Matrix diff = cand.rowwise() - pop.theta.row(m);  // row j: x_j - theta_m
    const Eigen::MatrixXd gram = diff * diff.transpose();
    total += gram.squaredNorm();
  }
  return std::sqrt(total);
}

double compute_g(const PerturbationSet& eps, double sigma) {
  const auto n = eps.epsilon.rows();
  if (n == 0) return 0.0;
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(eps.epsilon.cols());
  for (Eigen::Index i = 0; i < n; ++i) sum += eps.epsilon.row(i);
  return sigma * sigma / static_cast<double>(n) * sum.squaredNorm();
}

Matrix proof_update(const Population& pop, const PerturbationSet& eps,
                    const Eigen::VectorXd& shaped, const Graph& g, double sigma) {
  ESHyperparams hp;
  hp.alpha = 1.0;
  hp.sigma = sigma;
  hp.degree_normalize = true;
  return compute_update(pop, eps, shaped, g, hp);
}

BoundReport variance_bound(const Population& pop, const PerturbationSet& eps,
                           const Eigen::VectorXd& shaped, const Graph& g, double sigma,
                           std::size_t max_agents) {
  if (shaped.size() < 2) throw InvalidArgument("bound needs at least 2 agents");
  const double hi = shaped.maxCoeff();
  const double lo = shaped.minCoeff();
  if (std::abs(lo + hi) > 1e-12 * std::max(1.0, std::abs(hi)))
    throw PremiseError("rewards must satisfy min = -max for the bound to apply");

  BoundReport r;
  r.lhs_variance = update_variance(proof_update(pop, eps, shaped, g, sigma));
  r.f_term = compute_f(pop, eps, sigma, max_agents);
  r.g_term = compute_g(eps, sigma);
  r.reach_term = reachability(g);
  r.homog_term = homogeneity(g);
  const double n = static_cast<double>(pop.size());
  const double sigma4 = sigma * sigma * sigma * sigma;
  r.rhs_bound = hi * hi / (n * sigma4) * (r.reach_term * r.f_term - r.homog_term * r.g_term);
  r.holds = r.lhs_variance <= r.rhs_bound + 1e-9 * std::abs(r.rhs_bound);
  return r;
}

std::vector<BoundSweepRow> bound_sweep(const BoundSweepOptions& options) {
  if (options.min_agents < 2 || options.min_agents % 2 != 0 || options.max_agents % 2 != 0 ||
      options.max_agents < options.min_agents)
    throw InvalidArgument("bound sweep agent range must be even with min <= max");
  if (options.max_dim < 1) throw InvalidArgument("bound sweep max_dim must be >= 1");
  if (!(options.min_density > 0.0 && options.min_density <= options.max_density &&
        options.max_density <= 1.0))
    throw InvalidArgument("bound sweep density range must lie in (0, 1]");

  const Family families[] = {Family::Complete, Family::ErdosRenyi, Family::SmallWorld,
                             Family::ScaleFree};
  std::vector<BoundSweepRow> rows;
  rows.reserve(options.instances);
  for (std::size_t inst = 0; inst < options.instances; ++inst) {
    Engine rng(derive_seed(options.seed, {0x73776565ULL, inst}));
    std::uniform_int_distribution<std::size_t> half_n(options.min_agents / 2,
                                                      options.max_agents / 2);
    std::uniform_int_distribution<std::size_t> dim(1, options.max_dim);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    BoundSweepRow row;
    row.instance = inst;
    row.family = families[inst % 4];
    row.n = 2 * half_n(rng);
    row.d = dim(rng);
    row.mirrored = inst % 2 == 1;
    const double density =
        options.min_density + (options.max_density - options.min_density) * unit(rng);
    const double sigma = std::pow(10.0, -2.0 + 2.5 * unit(rng));
    const double spread = std::pow(10.0, -3.0 + 4.0 * unit(rng));
    const bool identical = unit(rng) < 0.2;

    FamilyParams params = matched_params(row.n, density);
    params.k = std::min(params.k, static_cast<int>(row.n) - 2);
    params.k = std::max(2, params.k - params.k % 2);
    const Graph g = sample_connected(row.family, row.n, params, rng(), 1000);

    Population pop;
    pop.theta.resize(static_cast<Eigen::Index>(row.n), static_cast<Eigen::Index>(row.d));
    for (Eigen::Index i = 0; i < pop.theta.rows(); ++i)
      for (Eigen::Index c = 0; c < pop.theta.cols(); ++c)
        pop.theta(i, c) = (identical && i > 0) ? pop.theta(0, c) : spread * normal(rng);

    PerturbationSet eps;
    eps.epsilon.resize(pop.theta.rows(), pop.theta.cols());
    for (Eigen::Index i = 0; i < eps.epsilon.rows(); ++i)
      for (Eigen::Index c = 0; c < eps.epsilon.cols(); ++c)
        eps.epsilon(i, c) = (row.mirrored && i % 2 == 1) ? -eps.epsilon(i - 1, c) : normal(rng);

    const Objective objective(inst % 3 == 0 ? ObjectiveKind::Rastrigin : ObjectiveKind::Sphere,
                              row.d);
    const Matrix cand = eps.candidates(pop, sigma);
    Eigen::VectorXd raw(cand.rows());
    for (Eigen::Index i = 0; i < cand.rows(); ++i)
      raw(i) = objective.evaluate(Eigen::VectorXd(cand.row(i).transpose()));
    const Eigen::VectorXd shaped = shape_fitness(raw);

    row.report = variance_bound(pop, eps, shaped, g, sigma, options.f_cap);
    row.reachability = row.report.reach_term;
    row.homogeneity = row.report.homog_term;
    rows.push_back(row);
  }
  return rows;
}

std::string bound_sweep_csv(const std::vector<BoundSweepRow>& rows) {
  std::ostringstream out;
  out << "instance,family,n,d,lhs,rhs,f,g,reachability,homogeneity,holds\n";
  for (const auto& r : rows) {
    out << r.instance << ',' << family_name(r.family) << ',' << r.n << ',' << r.d << ','
        << format_double(r.report.lhs_variance) << ',' << format_double(r.report.rhs_bound) << ','
        << format_double(r.report.f_term) << ',' << format_double(r.report.g_term) << ','
        << format_double(r.reachability) << ',' << format_double(r.homogeneity) << ','
        << (r.report.holds ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace netes
