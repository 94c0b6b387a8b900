#include "netes/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "netes/error.hpp"
#include "netes/io.hpp"

namespace netes {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so that leftovers
// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* get(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  void read(std::string_view key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
    }
  }
  void read(std::string_view key, std::size_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0)
        throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void read(std::string_view key, std::uint64_t& out, int /*tag*/) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void read(std::string_view key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void read(std::string_view key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
      out = v->get<bool>();
    }
  }
  void read(std::string_view key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(field(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
auto rethrow_as_config(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(field, e.what());
  }
}

ObjectiveSpec parse_objective_spec(const json& j) {
  ObjectReader r(j, "objective");
  ObjectiveSpec spec;
  std::string kind = std::string(objective_name(spec.kind));
  r.read("kind", kind);
  spec.kind = rethrow_as_config("objective.kind", [&] { return parse_objective(kind); });
  r.read("dim", spec.dim);
  r.read("episode_length", spec.task.episode_length);
  r.read("task_seed", spec.task.task_seed, 0);
  r.read("dt", spec.task.dt);
  r.read("friction", spec.task.friction);
  r.read("action_clip", spec.task.action_clip);
  if (const json* h = r.get("hidden")) {
    if (!h->is_array()) throw ConfigError("objective.hidden", "expected an array of layer sizes");
    spec.task.hidden.clear();
    for (const auto& v : *h) {
      if (!v.is_number_integer() || v.get<int>() < 1)
        throw ConfigError("objective.hidden", "layer sizes must be positive integers");
      spec.task.hidden.push_back(v.get<int>());
    }
  }
  if (const json* g = r.get("goal")) {
    if (!g->is_array() || g->size() != 2 || !(*g)[0].is_number() || !(*g)[1].is_number())
      throw ConfigError("objective.goal", "expected [x, y]");
    spec.task.explicit_goal = true;
    spec.task.goal = {(*g)[0].get<double>(), (*g)[1].get<double>()};
  }
  r.finish();
  return spec;
}

TopologySpec parse_topology(const json& j) {
  ObjectReader r(j, "topology");
  TopologySpec spec;
  std::string family = std::string(family_name(spec.family));
  r.read("family", family);
  spec.family = rethrow_as_config("topology.family", [&] { return parse_family(family); });

  const bool explicit_params = j.contains("p") || j.contains("k") || j.contains("m");
  if (const json* d = r.get("density")) {
    if (d->is_null()) {
      spec.density.reset();
    } else {
      if (!d->is_number()) throw ConfigError("topology.density", "expected a number or null");
      spec.density = d->get<double>();
    }
  } else if (explicit_params) {
    spec.density.reset();
  }
  if (explicit_params && spec.density)
    throw ConfigError("topology.density", "give either density or explicit p/k/m, not both");
  r.read("p", spec.params.p);
  r.read("k", spec.params.k);
  r.read("beta", spec.params.beta);
  r.read("m", spec.params.m);
  if (const json* e = r.get("edge_list")) {
    if (!e->is_null()) {
      if (!e->is_string()) throw ConfigError("topology.edge_list", "expected a path string");
      spec.edge_list = e->get<std::string>();
    }
  }
  r.read("max_attempts", spec.max_attempts);
  r.finish();
  return spec;
}

ESHyperparams parse_hyperparams(const json& j) {
  ObjectReader r(j, "hyperparams");
  ESHyperparams hp;
  r.read("alpha", hp.alpha);
  r.read("sigma", hp.sigma);
  r.read("broadcast_probability", hp.broadcast_probability);
  r.read("weight_decay", hp.weight_decay);
  r.read("degree_normalize", hp.degree_normalize);
  std::string source = hp.broadcast_source == BroadcastSource::Candidate ? "candidate" : "parameters";
  r.read("broadcast_source", source);
  if (source == "candidate") {
    hp.broadcast_source = BroadcastSource::Candidate;
  } else if (source == "parameters") {
    hp.broadcast_source = BroadcastSource::Parameters;
  } else {
    throw ConfigError("hyperparams.broadcast_source", "expected 'candidate' or 'parameters'");
  }
  r.finish();
  return hp;
}

}  // namespace

Objective make_objective(const ObjectiveSpec& spec) {
  if (spec.kind == ObjectiveKind::PointMass) return Objective(spec.task);
  return Objective(spec.kind, spec.dim);
}

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("name", "must not be empty");
  if (agents < 2) throw ConfigError("agents", "need at least 2 agents");
  if (agents % 2 != 0)
    throw ConfigError("agents", "mirrored sampling needs an even agent count, got " +
                                    std::to_string(agents));
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  if (iterations < 1) throw ConfigError("iterations", "must be >= 1");
  if (!(evaluation.probability >= 0.0 && evaluation.probability <= 1.0))
    throw ConfigError("evaluation.probability", "must be in [0, 1]");
  if (evaluation.episodes < 1) throw ConfigError("evaluation.episodes", "must be >= 1");
  if (evaluation.plateau_window < 1) throw ConfigError("evaluation.plateau_window", "must be >= 1");
  if (!(evaluation.plateau_threshold >= 0.0))
    throw ConfigError("evaluation.plateau_threshold", "must be >= 0");
  if (!(init.scale >= 0.0)) throw ConfigError("init.scale", "must be >= 0");
  if (topology.max_attempts < 1) throw ConfigError("topology.max_attempts", "must be >= 1");
  if (topology.density && !(*topology.density > 0.0 && *topology.density <= 1.0))
    throw ConfigError("topology.density", "must be in (0, 1]");
  if (objective.kind != ObjectiveKind::PointMass) {
    if (objective.dim < 1) throw ConfigError("objective.dim", "must be >= 1");
    if (objective.kind == ObjectiveKind::Rosenbrock && objective.dim < 2)
      throw ConfigError("objective.dim", "rosenbrock needs dim >= 2");
  } else if (objective.task.episode_length < 1) {
    throw ConfigError("objective.episode_length", "must be >= 1");
  }
  try {
    hyperparams.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("hyperparams", e.what());
  }
  if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  if (scatter && scatter->samples_per_family < 1)
    throw ConfigError("scatter.samples_per_family", "must be >= 1");
}

ExperimentConfig parse_config(const json& j) {
  ObjectReader r(j, "");
  ExperimentConfig c;
  r.read("name", c.name);
  if (const json* o = r.get("objective")) c.objective = parse_objective_spec(*o);
  if (const json* t = r.get("topology")) c.topology = parse_topology(*t);
  r.read("agents", c.agents);
  if (const json* h = r.get("hyperparams")) c.hyperparams = parse_hyperparams(*h);
  if (const json* i = r.get("init")) {
    ObjectReader ir(*i, "init");
    ir.read("scale", c.init.scale);
    ir.read("shared", c.init.shared);
    ir.finish();
  }
  r.read("iterations", c.iterations);
  if (const json* e = r.get("evaluation")) {
    ObjectReader er(*e, "evaluation");
    er.read("probability", c.evaluation.probability);
    er.read("episodes", c.evaluation.episodes);
    er.read("plateau_window", c.evaluation.plateau_window);
    er.read("plateau_threshold", c.evaluation.plateau_threshold);
    er.finish();
  }
  if (const json* d = r.get("diagnostics")) {
    ObjectReader dr(*d, "diagnostics");
    dr.read("enabled", c.diagnostics.enabled);
    dr.read("max_agents", c.diagnostics.max_agents);
    dr.finish();
  }
  if (const json* s = r.get("seeds")) {
    if (!s->is_array()) throw ConfigError("seeds", "expected an array of non-negative integers");
    c.seeds.clear();
    for (const auto& v : *s) {
      if (!v.is_number_unsigned()) throw ConfigError("seeds", "seeds must be non-negative integers");
      c.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  r.read("output_dir", c.output_dir);
  if (const json* s = r.get("scatter")) {
    ObjectReader sr(*s, "scatter");
    ScatterSpec spec;
    sr.read("n", spec.n);
    sr.read("density", spec.density);
    sr.read("samples_per_family", spec.samples_per_family);
    sr.read("seed", spec.seed, 0);
    sr.finish();
    c.scatter = spec;
  }
  if (const json* b = r.get("bound_sweep")) {
    ObjectReader br(*b, "bound_sweep");
    BoundSweepOptions opt;
    br.read("instances", opt.instances);
    br.read("min_agents", opt.min_agents);
    br.read("max_agents", opt.max_agents);
    br.read("max_dim", opt.max_dim);
    br.read("min_density", opt.min_density);
    br.read("max_density", opt.max_density);
    br.read("seed", opt.seed, 0);
    br.read("f_cap", opt.f_cap);
    br.finish();
    c.bound_sweep = opt;
  }
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("", "JSON parse error at line " + std::to_string(line) + ", column " +
                              std::to_string(col) + ": " + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) { return parse_config_text(read_file(path)); }

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  json obj;
  obj["kind"] = std::string(objective_name(c.objective.kind));
  obj["dim"] = c.objective.dim;
  if (c.objective.kind == ObjectiveKind::PointMass) {
    const auto& t = c.objective.task;
    obj["episode_length"] = t.episode_length;
    obj["task_seed"] = t.task_seed;
    obj["dt"] = t.dt;
    obj["friction"] = t.friction;
    obj["action_clip"] = t.action_clip;
    obj["hidden"] = t.hidden;
    if (t.explicit_goal) obj["goal"] = {t.goal.x(), t.goal.y()};
  }
  j["objective"] = obj;

  json topo;
  topo["family"] = std::string(family_name(c.topology.family));
  if (c.topology.density) {
    topo["density"] = *c.topology.density;
    topo["beta"] = c.topology.params.beta;
  } else {
    topo["density"] = nullptr;
    topo["p"] = c.topology.params.p;
    topo["k"] = c.topology.params.k;
    topo["beta"] = c.topology.params.beta;
    topo["m"] = c.topology.params.m;
  }
  topo["edge_list"] = c.topology.edge_list ? json(*c.topology.edge_list) : json(nullptr);
  topo["max_attempts"] = c.topology.max_attempts;
  j["topology"] = topo;

  j["agents"] = c.agents;
  j["hyperparams"] = {
      {"alpha", c.hyperparams.alpha},
      {"sigma", c.hyperparams.sigma},
      {"broadcast_probability", c.hyperparams.broadcast_probability},
      {"weight_decay", c.hyperparams.weight_decay},
      {"degree_normalize", c.hyperparams.degree_normalize},
      {"broadcast_source",
       c.hyperparams.broadcast_source == BroadcastSource::Candidate ? "candidate" : "parameters"},
  };
  j["init"] = {{"scale", c.init.scale}, {"shared", c.init.shared}};
  j["iterations"] = c.iterations;
  j["evaluation"] = {{"probability", c.evaluation.probability},
                     {"episodes", c.evaluation.episodes},
                     {"plateau_window", c.evaluation.plateau_window},
                     {"plateau_threshold", c.evaluation.plateau_threshold}};
  j["diagnostics"] = {{"enabled", c.diagnostics.enabled},
                      {"max_agents", c.diagnostics.max_agents}};
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir;
  if (c.scatter)
    j["scatter"] = {{"n", c.scatter->n},
                    {"density", c.scatter->density},
                    {"samples_per_family", c.scatter->samples_per_family},
                    {"seed", c.scatter->seed}};
  if (c.bound_sweep)
    j["bound_sweep"] = {{"instances", c.bound_sweep->instances},
                        {"min_agents", c.bound_sweep->min_agents},
                        {"max_agents", c.bound_sweep->max_agents},
                        {"max_dim", c.bound_sweep->max_dim},
                        {"min_density", c.bound_sweep->min_density},
                        {"max_density", c.bound_sweep->max_density},
                        {"seed", c.bound_sweep->seed},
                        {"f_cap", c.bound_sweep->f_cap}};
  return j;
}

ExperimentConfig apply_preset(ExperimentConfig c, std::string_view preset) {
  const double p_b = c.hyperparams.broadcast_probability > 0.0 ? c.hyperparams.broadcast_probability
                                                               : 0.8;
  auto complete = [&] {
    c.topology.family = Family::Complete;
    c.topology.edge_list.reset();
  };
  if (preset == "netes") {
    c.topology.family = Family::ErdosRenyi;
    c.topology.edge_list.reset();
    if (!c.topology.density) c.topology.density = 0.5;
    c.init.shared = false;
    c.hyperparams.broadcast_probability = p_b;
  } else if (preset == "broadcast-only") {
    c.topology.family = Family::Edgeless;
    c.topology.edge_list.reset();
    c.init.shared = false;
    c.hyperparams.broadcast_probability = p_b;
  } else if (preset == "shared-init-no-broadcast") {
    complete();
    c.init.shared = true;
    c.hyperparams.broadcast_probability = 0.0;
  } else if (preset == "shared-init-broadcast") {
    complete();
    c.init.shared = true;
    c.hyperparams.broadcast_probability = p_b;
  } else if (preset == "distinct-init-no-broadcast") {
    complete();
    c.init.shared = false;
    c.hyperparams.broadcast_probability = 0.0;
  } else if (preset == "distinct-init-broadcast") {
    complete();
    c.init.shared = false;
    c.hyperparams.broadcast_probability = p_b;
  } else {
    std::string valid;
    for (auto n : kPresetNames) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw ConfigError("preset", "unknown preset '" + std::string(preset) + "' (valid: " + valid + ")");
  }
  c.name += "-" + std::string(preset);
  return c;
}

}  // namespace netes
