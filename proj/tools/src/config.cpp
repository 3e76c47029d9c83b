#include "selfsim_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace selfsim::cli {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

template <class T>
void read(const json& j, const std::string& path, const std::string& key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(join(path, key), std::string("wrong type (") + e.what() + ")");
  }
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

bool increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from(const json& j, const std::string& path) {
  require(j.is_array() && j.size() == 3, path, "expected three numbers");
  try {
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } catch (const json::exception&) {
    throw ConfigError(path, "expected three numbers");
  }
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  auto& o = c.evolve.options;
  o.t_end = 1.0;
  o.dt = 2.5e-3;
  o.snapshot_times = {0.25, 0.5};
  o.bumps = {TestBump{{0.0, 0.0, 0.0}, 4.0, 0.1, 0.9}, TestBump{{2.0, 1.0, 0.0}, 5.0, 0.2, 0.8},
             TestBump{{-3.0, 0.0, 2.0}, 4.5, 0.3, 1.0}};
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c = default_config();
  check_keys(j, "", {"grid", "data", "model", "kappas", "mu_schedule", "solver", "residual_tolerance", "semigroup",
                     "evolve", "estimates", "stages", "output", "seed", "save_sweep_fields"});

  if (j.contains("grid")) {
    const json& g = j["grid"];
    check_keys(g, "grid", {"n", "half_width"});
    read(g, "grid", "n", c.n);
    read(g, "grid", "half_width", c.half_width);
  }
  if (j.contains("data")) {
    const json& d = j["data"];
    check_keys(d, "data", {"family", "amplitude", "window_inner", "window_outer", "sphere"});
    std::string fam = to_string(c.data.family);
    read(d, "data", "family", fam);
    try {
      c.data.family = data_family_from_string(fam);
    } catch (const std::exception&) {
      throw ConfigError("data.family", "unknown family '" + fam + "'");
    }
    read(d, "data", "amplitude", c.data.amplitude);
    read(d, "data", "window_inner", c.data.window_inner);
    read(d, "data", "window_outer", c.data.window_outer);
    if (d.contains("sphere")) {
      const json& s = d["sphere"];
      check_keys(s, "data.sphere", {"n_theta", "n_phi", "values"});
      SphereTable t;
      read(s, "data.sphere", "n_theta", t.n_theta);
      read(s, "data.sphere", "n_phi", t.n_phi);
      require(s.contains("values") && s["values"].is_array(), "data.sphere.values", "expected an array");
      for (std::size_t i = 0; i < s["values"].size(); ++i)
        t.values.push_back(vec3_from(s["values"][i], "data.sphere.values[" + std::to_string(i) + "]"));
      c.data.sphere_samples = std::move(t);
    }
  }
  if (j.contains("model")) {
    std::string m;
    read(j, "", "model", m);
    try {
      c.model = model_from_string(m);
    } catch (const std::exception&) {
      throw ConfigError("model", "unknown model '" + m + "'");
    }
  }
  read(j, "", "kappas", c.kappas);
  read(j, "", "mu_schedule", c.mu_schedule);
  if (j.contains("solver")) {
    const json& s = j["solver"];
    check_keys(s, "solver", {"tolerance", "intermediate_tolerance", "max_iterations", "anderson_depth",
                             "initial_damping", "divergence_window", "min_step", "coarse_q", "fine_q"});
    auto& o = c.solver;
    read(s, "solver", "tolerance", o.tolerance);
    read(s, "solver", "intermediate_tolerance", o.intermediate_tolerance);
    read(s, "solver", "max_iterations", o.max_iterations);
    read(s, "solver", "anderson_depth", o.anderson_depth);
    read(s, "solver", "initial_damping", o.initial_damping);
    read(s, "solver", "divergence_window", o.divergence_window);
    read(s, "solver", "min_step", o.min_step);
    read(s, "solver", "coarse_q", o.coarse_q);
    read(s, "solver", "fine_q", o.fine_q);
  }
  read(j, "", "residual_tolerance", c.residual_tolerance);
  if (j.contains("semigroup")) {
    const json& s = j["semigroup"];
    check_keys(s, "semigroup", {"kappas", "times", "s1", "s"});
    read(s, "semigroup", "kappas", c.semigroup.kappas);
    read(s, "semigroup", "times", c.semigroup.times);
    read(s, "semigroup", "s1", c.semigroup.s1);
    read(s, "semigroup", "s", c.semigroup.s);
  }
  if (j.contains("evolve")) {
    const json& e = j["evolve"];
    check_keys(e, "evolve", {"kappa", "t_end", "dt", "cfl_max", "snapshot_times", "bumps", "fit_t_min", "fit_t_max",
                             "pair_times", "margin_tolerance"});
    auto& o = c.evolve.options;
    read(e, "evolve", "kappa", c.evolve.kappa);
    read(e, "evolve", "t_end", o.t_end);
    read(e, "evolve", "dt", o.dt);
    read(e, "evolve", "cfl_max", o.cfl_max);
    read(e, "evolve", "snapshot_times", o.snapshot_times);
    read(e, "evolve", "fit_t_min", c.evolve.fit_t_min);
    read(e, "evolve", "fit_t_max", c.evolve.fit_t_max);
    read(e, "evolve", "pair_times", c.evolve.pair_times);
    read(e, "evolve", "margin_tolerance", c.evolve.margin_tolerance);
    if (e.contains("bumps")) {
      require(e["bumps"].is_array(), "evolve.bumps", "expected an array");
      o.bumps.clear();
      for (std::size_t i = 0; i < e["bumps"].size(); ++i) {
        const std::string p = "evolve.bumps[" + std::to_string(i) + "]";
        const json& b = e["bumps"][i];
        check_keys(b, p, {"centre", "radius", "t_start", "t_stop"});
        TestBump t;
        if (b.contains("centre")) t.centre = vec3_from(b["centre"], p + ".centre");
        read(b, p, "radius", t.radius);
        read(b, p, "t_start", t.t_start);
        read(b, p, "t_stop", t.t_stop);
        o.bumps.push_back(t);
      }
    }
  }
  if (j.contains("estimates")) {
    check_keys(j["estimates"], "estimates", {"lorentz_samples"});
    read(j["estimates"], "estimates", "lorentz_samples", c.estimates.lorentz_samples);
  }
  read(j, "", "stages", c.stages);
  if (j.contains("output")) {
    std::string out;
    read(j, "", "output", out);
    c.output = out;
  }
  read(j, "", "seed", c.seed);
  read(j, "", "save_sweep_fields", c.save_sweep_fields);
  validate(c);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["grid"] = {{"n", c.n}, {"half_width", c.half_width}};
  json d = {{"family", to_string(c.data.family)},
            {"amplitude", c.data.amplitude},
            {"window_inner", c.data.window_inner},
            {"window_outer", c.data.window_outer}};
  if (c.data.sphere_samples) {
    json vals = json::array();
    for (const Vec3& v : c.data.sphere_samples->values) vals.push_back(vec3_json(v));
    d["sphere"] = {{"n_theta", c.data.sphere_samples->n_theta}, {"n_phi", c.data.sphere_samples->n_phi}, {"values", vals}};
  }
  j["data"] = d;
  j["model"] = to_string(c.model);
  j["kappas"] = c.kappas;
  j["mu_schedule"] = c.mu_schedule;
  const auto& s = c.solver;
  j["solver"] = {{"tolerance", s.tolerance},           {"intermediate_tolerance", s.intermediate_tolerance},
                 {"max_iterations", s.max_iterations}, {"anderson_depth", s.anderson_depth},
                 {"initial_damping", s.initial_damping}, {"divergence_window", s.divergence_window},
                 {"min_step", s.min_step},             {"coarse_q", s.coarse_q},
                 {"fine_q", s.fine_q}};
  j["residual_tolerance"] = c.residual_tolerance;
  j["semigroup"] = {{"kappas", c.semigroup.kappas}, {"times", c.semigroup.times}, {"s1", c.semigroup.s1}, {"s", c.semigroup.s}};
  const auto& o = c.evolve.options;
  json bumps = json::array();
  for (const TestBump& b : o.bumps)
    bumps.push_back({{"centre", vec3_json(b.centre)}, {"radius", b.radius}, {"t_start", b.t_start}, {"t_stop", b.t_stop}});
  j["evolve"] = {{"kappa", c.evolve.kappa},
                 {"t_end", o.t_end},
                 {"dt", o.dt},
                 {"cfl_max", o.cfl_max},
                 {"snapshot_times", o.snapshot_times},
                 {"bumps", bumps},
                 {"fit_t_min", c.evolve.fit_t_min},
                 {"fit_t_max", c.evolve.fit_t_max},
                 {"pair_times", c.evolve.pair_times},
                 {"margin_tolerance", c.evolve.margin_tolerance}};
  j["estimates"] = {{"lorentz_samples", c.estimates.lorentz_samples}};
  j["stages"] = c.stages;
  j["output"] = c.output.string();
  j["seed"] = c.seed;
  j["save_sweep_fields"] = c.save_sweep_fields;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = text.substr(0, std::min<std::size_t>(e.byte, text.size()));
    const long line = 1 + std::count(upto.begin(), upto.end(), '\n');
    throw ConfigError(path.string() + ":" + std::to_string(line), "parse error");
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& c) {
  require(c.n >= 8 && c.n % 2 == 0, "grid.n", "must be an even integer >= 8");
  require(c.half_width > 0.0, "grid.half_width", "must be positive");
  require(c.data.amplitude >= 0.0, "data.amplitude", "must be nonnegative");
  require(c.data.window_inner >= 4.0 * c.half_width / c.n, "data.window_inner", "must be at least two grid spacings");
  require(c.data.window_outer < 0.0 || c.data.window_outer > c.data.window_inner, "data.window_outer",
          "must exceed window_inner (or be negative for the default)");
  if (c.data.family == DataFamily::sphere_profile) {
    require(c.data.sphere_samples.has_value(), "data.sphere", "required for the sphere_profile family");
    const auto& t = *c.data.sphere_samples;
    require(t.n_theta >= 2 && t.n_phi >= 1 && t.values.size() == std::size_t(t.n_theta) * t.n_phi, "data.sphere",
            "values must hold n_theta * n_phi entries");
  }
  require(!c.kappas.empty() && increasing(c.kappas) && c.kappas.front() >= 0.0, "kappas",
          "must be a nonempty increasing list of nonnegative numbers");
  require(!c.mu_schedule.empty() && increasing(c.mu_schedule) && c.mu_schedule.front() > 0.0 &&
              c.mu_schedule.back() <= 1.0,
          "mu_schedule", "must increase within (0, 1]");
  const auto& s = c.solver;
  require(s.tolerance > 0.0, "solver.tolerance", "must be positive");
  require(s.intermediate_tolerance > 0.0, "solver.intermediate_tolerance", "must be positive");
  require(s.max_iterations >= 1, "solver.max_iterations", "must be >= 1");
  require(s.anderson_depth >= 0, "solver.anderson_depth", "must be >= 0");
  require(s.initial_damping > 0.0 && s.initial_damping <= 1.0, "solver.initial_damping", "must lie in (0, 1]");
  require(s.divergence_window >= 1, "solver.divergence_window", "must be >= 1");
  require(s.min_step > 0.0 && s.min_step <= 1.0, "solver.min_step", "must lie in (0, 1]");
  require(s.coarse_q == 0 || (s.coarse_q >= 4 && s.coarse_q % 2 == 0), "solver.coarse_q", "must be 0 or even >= 4");
  require(s.fine_q == 0 || (s.fine_q >= 4 && s.fine_q % 2 == 0), "solver.fine_q", "must be 0 or even >= 4");
  require(c.residual_tolerance > 0.0, "residual_tolerance", "must be positive");
  require(c.semigroup.kappas.size() >= 2, "semigroup.kappas", "needs at least two values");
  for (double k : c.semigroup.kappas) require(k >= 0.0, "semigroup.kappas", "must be nonnegative");
  require(c.semigroup.times.size() >= 2 && increasing(c.semigroup.times) && c.semigroup.times.front() > 0.0,
          "semigroup.times", "must be at least two increasing positive times");
  require(1.0 <= c.semigroup.s1 && c.semigroup.s1 < c.semigroup.s, "semigroup.s1", "need 1 <= s1 < s");
  const auto& o = c.evolve.options;
  require(c.evolve.kappa >= 0.0, "evolve.kappa", "must be nonnegative");
  require(o.t_end > 0.0, "evolve.t_end", "must be positive");
  require(o.dt > 0.0 && o.dt <= o.t_end, "evolve.dt", "must lie in (0, t_end]");
  require(o.cfl_max > 0.0, "evolve.cfl_max", "must be positive");
  for (double t : o.snapshot_times) require(t > 0.0 && t < o.t_end, "evolve.snapshot_times", "must lie in (0, t_end)");
  // bump resolution depends on the grid, so it is only enforced when the evolution runs
  const bool evolves = std::find(c.stages.begin(), c.stages.end(), "evolve") != c.stages.end();
  const double h = 2.0 * c.half_width / c.n;
  for (std::size_t i = 0; i < o.bumps.size() && evolves; ++i) {
    const auto& b = o.bumps[i];
    const std::string p = "evolve.bumps[" + std::to_string(i) + "]";
    require(b.radius >= 8.0 * h, p + ".radius", "must be at least 8 grid spacings");
    require(0.0 <= b.t_start && b.t_start < b.t_stop && b.t_stop <= o.t_end, p, "need 0 <= t_start < t_stop <= t_end");
  }
  require(0.0 < c.evolve.fit_t_min && c.evolve.fit_t_min < c.evolve.fit_t_max && c.evolve.fit_t_max <= o.t_end,
          "evolve.fit_t_min", "need 0 < fit_t_min < fit_t_max <= t_end");
  require(c.evolve.pair_times.size() >= 2 && increasing(c.evolve.pair_times) && c.evolve.pair_times.front() >= 0.0 &&
              c.evolve.pair_times.back() <= o.t_end,
          "evolve.pair_times", "must increase within [0, t_end]");
  require(c.evolve.margin_tolerance >= 0.0, "evolve.margin_tolerance", "must be nonnegative");
  require(c.estimates.lorentz_samples >= 0, "estimates.lorentz_samples", "must be nonnegative");
  for (std::size_t i = 0; i < c.stages.size(); ++i)
    require(std::find(kAllStages.begin(), kAllStages.end(), c.stages[i]) != kAllStages.end(),
            "stages[" + std::to_string(i) + "]", "unknown stage '" + c.stages[i] + "'");
  require(!c.output.empty(), "output", "must not be empty");
}

}  // namespace selfsim::cli
