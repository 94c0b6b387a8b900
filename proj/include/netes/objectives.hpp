#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace netes {

enum class ObjectiveKind { Sphere, Rastrigin, Ackley, Rosenbrock, PointMass };

std::string_view objective_name(ObjectiveKind kind);
ObjectiveKind parse_objective(std::string_view name);

// Fully connected tanh network. Parameters are laid out layer by layer as a
// row-major (out x in) weight block followed by the out-sized bias.
class MlpPolicy {
 public:
  MlpPolicy(std::vector<int> layer_sizes, Eigen::VectorXd weights);

  static std::size_t parameter_count(const std::vector<int>& layer_sizes);

  const std::vector<int>& layer_sizes() const noexcept { return layer_sizes_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }

 private:
  std::vector<int> layer_sizes_;
  Eigen::VectorXd weights_;
};

// Affine + tanh on hidden layers, affine output. Throws ShapeError on a
// mismatched observation.
Eigen::VectorXd mlp_forward(const MlpPolicy& policy, std::span<const double> obs);

// 2-D point mass chasing a fixed goal. Observation is (position, velocity).
struct PointMassTask {
  int episode_length = 100;
  double dt = 0.05;
  double friction = 0.1;
  double action_clip = 1.0;
  std::uint64_t task_seed = 0;
  bool explicit_goal = false;         // use `goal` instead of drawing from task_seed
  Eigen::Vector2d goal{0.0, 0.0};
  Eigen::Vector2d start{0.0, 0.0};
  std::vector<int> hidden{16, 16};

  static constexpr int kObsDim = 4;
  static constexpr int kActDim = 2;

  std::vector<int> layer_sizes() const;
  // Goal in [-1, 1]^2 drawn from task_seed unless explicit_goal is set.
  Eigen::Vector2d resolved_goal() const;
};

// Episode return: sum over steps of -||position - goal||.
double rollout(const PointMassTask& task, const MlpPolicy& policy);

class Objective {
 public:
  // Synthetic landscape on R^dim.
  Objective(ObjectiveKind kind, std::size_t dim);
  // Point-mass control task; dim is the policy's parameter count.
  explicit Objective(const PointMassTask& task);

  ObjectiveKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const PointMassTask& task() const noexcept { return task_; }

  // Reward (maximized). Synthetic kinds return -f(theta), so the optimum is 0.
  double evaluate(std::span<const double> theta) const;
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
    return evaluate(std::span<const double>(theta.data(), static_cast<std::size_t>(theta.size())));
  }

 private:
  ObjectiveKind kind_;
  std::size_t dim_;
  PointMassTask task_;
};

double sphere(std::span<const double> x);
double rastrigin(std::span<const double> x);
double ackley(std::span<const double> x);
double rosenbrock(std::span<const double> x);

}  // namespace netes
