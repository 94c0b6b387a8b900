#include "netes/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "netes/error.hpp"
#include "netes/rng.hpp"

namespace netes {

namespace {

constexpr std::string_view kObjectiveNames[] = {"sphere", "rastrigin", "ackley", "rosenbrock",
                                                "point_mass"};

}  // namespace

std::string_view objective_name(ObjectiveKind kind) {
  return kObjectiveNames[static_cast<int>(kind)];
}

ObjectiveKind parse_objective(std::string_view name) {
  for (int i = 0; i < 5; ++i)
    if (kObjectiveNames[i] == name) return static_cast<ObjectiveKind>(i);
  std::string valid;
  for (auto n : kObjectiveNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw InvalidArgument("unknown objective '" + std::string(name) + "' (valid: " + valid + ")");
}

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return s;
}

double ackley(std::span<const double> x) {
  const double d = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * std::numbers::pi * v);
  }
  // Grouped so that f(0) is exactly 0.
  return (20.0 - 20.0 * std::exp(-0.2 * std::sqrt(sq / d))) + (std::exp(1.0) - std::exp(cs / d));
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

MlpPolicy::MlpPolicy(std::vector<int> layer_sizes, Eigen::VectorXd weights)
    : layer_sizes_(std::move(layer_sizes)), weights_(std::move(weights)) {
  if (layer_sizes_.size() < 2) throw InvalidArgument("MLP needs at least input and output layers");
  for (int s : layer_sizes_)
    if (s < 1) throw InvalidArgument("MLP layer sizes must be positive");
  const auto expected = parameter_count(layer_sizes_);
  if (static_cast<std::size_t>(weights_.size()) != expected)
    throw ShapeError("MLP expects " + std::to_string(expected) + " parameters, got " +
                     std::to_string(weights_.size()));
}

std::size_t MlpPolicy::parameter_count(const std::vector<int>& layer_sizes) {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    count += static_cast<std::size_t>(layer_sizes[l + 1]) *
             static_cast<std::size_t>(layer_sizes[l] + 1);
  return count;
}

Eigen::VectorXd mlp_forward(const MlpPolicy& policy, std::span<const double> obs) {
  const auto& sizes = policy.layer_sizes();
  if (obs.size() != static_cast<std::size_t>(sizes.front()))
    throw ShapeError("observation has " + std::to_string(obs.size()) + " entries, policy expects " +
                     std::to_string(sizes.front()));
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(obs.data(), sizes.front());
  const double* p = policy.weights().data();
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
        p, out, in);
    p += static_cast<std::ptrdiff_t>(out) * in;
    Eigen::Map<const Eigen::VectorXd> b(p, out);
    p += out;
    Eigen::VectorXd y = w * x + b;
    if (l + 2 < sizes.size()) y = y.array().tanh();
    x = std::move(y);
  }
  return x;
}

std::vector<int> PointMassTask::layer_sizes() const {
  std::vector<int> sizes{kObsDim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(kActDim);
  return sizes;
}

Eigen::Vector2d PointMassTask::resolved_goal() const {
  if (explicit_goal) return goal;
  Engine rng(derive_seed(task_seed, {0x676f616cULL}));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double gx = u(rng);
  const double gy = u(rng);
  return {gx, gy};
}

double rollout(const PointMassTask& task, const MlpPolicy& policy) {
  const auto sizes = task.layer_sizes();
  if (policy.layer_sizes() != sizes) throw ShapeError("policy layout does not match the task");
  const Eigen::Vector2d goal = task.resolved_goal();
  Eigen::Vector2d pos = task.start;
  Eigen::Vector2d vel = Eigen::Vector2d::Zero();
  double total = 0.0;
  for (int t = 0; t < task.episode_length; ++t) {
    const double obs[4] = {pos.x(), pos.y(), vel.x(), vel.y()};
    Eigen::Vector2d force = mlp_forward(policy, obs);
    force = force.cwiseMax(-task.action_clip).cwiseMin(task.action_clip);
    pos += vel * task.dt;
    vel += force * task.dt - task.friction * vel;
    total -= (pos - goal).norm();
  }
  return total;
}

Objective::Objective(ObjectiveKind kind, std::size_t dim) : kind_(kind), dim_(dim) {
  if (kind == ObjectiveKind::PointMass)
    throw InvalidArgument("point_mass objectives are built from a PointMassTask");
  if (dim < 1) throw InvalidArgument("objective dimension must be >= 1");
  if (kind == ObjectiveKind::Rosenbrock && dim < 2)
    throw InvalidArgument("rosenbrock needs dimension >= 2");
}

Objective::Objective(const PointMassTask& task)
    : kind_(ObjectiveKind::PointMass),
      dim_(MlpPolicy::parameter_count(task.layer_sizes())),
      task_(task) {
  if (task.episode_length < 1) throw InvalidArgument("episode_length must be >= 1");
  if (!(task.dt > 0.0)) throw InvalidArgument("dt must be positive");
}

double Objective::evaluate(std::span<const double> theta) const {
  if (theta.size() != dim_)
    throw ShapeError("objective expects " + std::to_string(dim_) + " parameters, got " +
                     std::to_string(theta.size()));
  if (!std::all_of(theta.begin(), theta.end(), [](double v) { return std::isfinite(v); }))
    throw NumericError("non-finite parameter passed to objective");
  switch (kind_) {
    case ObjectiveKind::Sphere: return -sphere(theta);
    case ObjectiveKind::Rastrigin: return -rastrigin(theta);
    case ObjectiveKind::Ackley: return -ackley(theta);
    case ObjectiveKind::Rosenbrock: return -rosenbrock(theta);
    case ObjectiveKind::PointMass: {
      Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                                            static_cast<Eigen::Index>(dim_));
      return rollout(task_, MlpPolicy(task_.layer_sizes(), std::move(w)));
    }
  }
  throw InvalidArgument("unknown objective kind");
}

}  // namespace netes
