#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "netes/diagnostics.hpp"
#include "netes/objectives.hpp"
#include "netes/optimizer.hpp"
#include "netes/topology.hpp"

namespace netes {

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Sphere;
  std::size_t dim = 10;   // ignored for point_mass (derived from the policy)
  PointMassTask task;     // point_mass only
};

Objective make_objective(const ObjectiveSpec& spec);

struct TopologySpec {
  Family family = Family::ErdosRenyi;
  // When set, family parameters are derived from it (see matched_params);
  // explicit p/k/m are then rejected as conflicting.
  std::optional<double> density = 0.5;
  FamilyParams params;
  std::optional<std::string> edge_list;
  std::size_t max_attempts = 1000;
};

struct InitSpec {
  double scale = 0.05;  // standard deviation of the per-agent draw
  bool shared = false;
};

struct EvaluationSpec {
  double probability = 0.08;
  std::size_t episodes = 1;
  std::size_t plateau_window = 50;
  double plateau_threshold = 0.05;
};

struct DiagnosticsSpec {
  bool enabled = false;
  std::size_t max_agents = kDefaultFCap;
};

struct ScatterSpec {
  std::size_t n = 100;
  double density = 0.5;
  std::size_t samples_per_family = 50;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ObjectiveSpec objective;
  TopologySpec topology;
  std::size_t agents = 100;
  ESHyperparams hyperparams;
  InitSpec init;
  std::size_t iterations = 1000;
  EvaluationSpec evaluation;
  DiagnosticsSpec diagnostics;
  std::vector<std::uint64_t> seeds{0};
  std::string output_dir = "out";
  std::optional<ScatterSpec> scatter;
  std::optional<BoundSweepOptions> bound_sweep;

  // Throws ConfigError naming the first invalid field.
  void validate() const;
};

// Strict parse: unknown keys and wrong types raise ConfigError with the
// dotted field path. Missing keys take the defaults above.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::string& path);

// Fully resolved form, every default spelled out. parse_config(to_json(c))
// reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

inline constexpr std::string_view kPresetNames[] = {
    "netes",
    "broadcast-only",
    "shared-init-no-broadcast",
    "shared-init-broadcast",
    "distinct-init-no-broadcast",
    "distinct-init-broadcast",
};

// Rewrites topology, init sharing and broadcast probability to one of the
// ablation controls. Broadcast presets keep the configured p_b, or use 0.8 if
// it is zero. The preset name is appended to config.name.
ExperimentConfig apply_preset(ExperimentConfig config, std::string_view preset);

}  // namespace netes
