#include <doctest.h>

#include <cmath>
#include <vector>

#include "netes/error.hpp"
#include "netes/objectives.hpp"

using namespace netes;

namespace {

// Step-by-step simulation of the point mass under a constant action, kept
// separate from rollout().
double constant_action_return(const PointMassTask& t, Eigen::Vector2d a) {
  a = a.cwiseMax(-t.action_clip).cwiseMin(t.action_clip);
  Eigen::Vector2d x = t.start, v = Eigen::Vector2d::Zero();
  const Eigen::Vector2d goal = t.resolved_goal();
  double total = 0.0;
  for (int s = 0; s < t.episode_length; ++s) {
    x += v * t.dt;
    v += a * t.dt - t.friction * v;
    total -= (x - goal).norm();
  }
  return total;
}

}  // namespace

TEST_CASE("synthetic objectives") {
  const std::vector<double> zero(5, 0.0);
  CHECK(Objective(ObjectiveKind::Sphere, 5).evaluate(zero) == 0.0);
  CHECK(Objective(ObjectiveKind::Rastrigin, 2).evaluate(std::vector<double>{0, 0}) == 0.0);
  CHECK(Objective(ObjectiveKind::Rastrigin, 2).evaluate(std::vector<double>{1, 1}) ==
        doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(Objective(ObjectiveKind::Ackley, 5).evaluate(zero) == 0.0);
  CHECK(Objective(ObjectiveKind::Rosenbrock, 3).evaluate(std::vector<double>{1, 1, 1}) == 0.0);
  CHECK(sphere(std::vector<double>{1, 2}) == 5.0);
  CHECK(rosenbrock(std::vector<double>{0, 0}) == 1.0);
  CHECK(Objective(ObjectiveKind::Ackley, 2).evaluate(std::vector<double>{1, 1}) < 0.0);
}

TEST_CASE("objective errors") {
  const Objective s(ObjectiveKind::Sphere, 3);
  CHECK_THROWS_AS(s.evaluate(std::vector<double>{1, 2}), ShapeError);
  CHECK_THROWS_AS(s.evaluate(std::vector<double>{1, std::nan(""), 2}), NumericError);
  CHECK_THROWS_AS(s.evaluate(std::vector<double>{1, INFINITY, 2}), NumericError);
  CHECK_THROWS_AS(Objective(ObjectiveKind::Rosenbrock, 1), InvalidArgument);
  CHECK_THROWS_AS(Objective(ObjectiveKind::Sphere, 0), InvalidArgument);
  CHECK_THROWS_AS(parse_objective("griewank"), InvalidArgument);
  CHECK(parse_objective("rastrigin") == ObjectiveKind::Rastrigin);
  CHECK(objective_name(ObjectiveKind::PointMass) == "point_mass");
}

TEST_CASE("mlp forward") {
  const std::vector<int> sizes{3, 4, 2};
  CHECK(MlpPolicy::parameter_count(sizes) == 3 * 4 + 4 + 4 * 2 + 2);
  const MlpPolicy zero(sizes, Eigen::VectorXd::Zero(26));
  const Eigen::VectorXd a = mlp_forward(zero, std::vector<double>{0.3, -1, 2});
  CHECK(a.size() == 2);
  CHECK(a.cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(4 * 4 + 4);
  for (int i = 0; i < 4; ++i) w[i * 4 + i] = 1.0;
  const MlpPolicy identity({4, 4}, w);
  const Eigen::VectorXd out = mlp_forward(identity, std::vector<double>{1, -2, 3, 0.5});
  CHECK(out[0] == 1.0);
  CHECK(out[1] == -2.0);
  CHECK(out[2] == 3.0);
  CHECK(out[3] == 0.5);

  // One hidden unit: out = w2 * tanh(w1 . x + b1) + b2.
  Eigen::VectorXd small(2 + 1 + 1 + 1);
  small << 0.5, -1.0, 0.1, 2.0, -0.3;
  const MlpPolicy tiny({2, 1, 1}, small);
  const double expect = 2.0 * std::tanh(0.5 * 0.4 - 1.0 * 0.2 + 0.1) - 0.3;
  CHECK(mlp_forward(tiny, std::vector<double>{0.4, 0.2})[0] == doctest::Approx(expect).epsilon(1e-15));

  CHECK_THROWS_AS(mlp_forward(zero, std::vector<double>{1, 2}), ShapeError);
  CHECK_THROWS_AS(MlpPolicy(sizes, Eigen::VectorXd::Zero(5)), ShapeError);
}

TEST_CASE("point mass rollouts") {
  PointMassTask t;
  t.explicit_goal = true;
  t.goal = {0.0, 0.0};
  const MlpPolicy zero(t.layer_sizes(), Eigen::VectorXd::Zero(
                                            static_cast<Eigen::Index>(MlpPolicy::parameter_count(t.layer_sizes()))));
  CHECK(rollout(t, zero) == 0.0);

  t.goal = {1.0, 0.0};
  CHECK(rollout(t, zero) == doctest::Approx(-100.0).epsilon(1e-14));

  PointMassTask drawn;
  drawn.task_seed = 5;
  const double r1 = rollout(drawn, zero);
  CHECK(r1 == rollout(drawn, zero));
  CHECK(r1 == doctest::Approx(-100.0 * drawn.resolved_goal().norm()));
  const Eigen::Vector2d g = drawn.resolved_goal();
  CHECK(std::abs(g.x()) <= 1.0);
  CHECK(std::abs(g.y()) <= 1.0);

  // Bias-only output layer gives a constant action; compare against a direct
  // simulation. The action 3.0 exceeds the clip.
  const std::size_t count = MlpPolicy::parameter_count(drawn.layer_sizes());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(count));
  w[static_cast<Eigen::Index>(count) - 2] = 3.0;
  w[static_cast<Eigen::Index>(count) - 1] = -0.4;
  const MlpPolicy constant(drawn.layer_sizes(), w);
  CHECK(rollout(drawn, constant) ==
        doctest::Approx(constant_action_return(drawn, {3.0, -0.4})).epsilon(1e-12));

  const Objective obj(drawn);
  CHECK(obj.dim() == count);
  CHECK(obj.evaluate(w) == rollout(drawn, constant));
}
