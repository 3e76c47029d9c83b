#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfsim/evolution.hpp"
#include "selfsim/initial_data.hpp"
#include "selfsim/profile.hpp"
#include "selfsim/profile_solver.hpp"

namespace selfsim::cli {

inline const std::vector<std::string> kAllStages = {"semigroup-check", "solve-profile", "kappa-sweep",
                                                    "evolve",          "estimates",     "report"};

struct SemigroupConfig {
  std::vector<double> kappas{0.0, 1.0, 64.0};
  std::vector<double> times{0.25, 0.5, 1.0, 2.0, 4.0};
  double s1 = 2.0;
  double s = 6.0;
};

struct EvolveConfig {
  double kappa = 1.0;
  EvolveOptions options;
  double fit_t_min = 0.05;
  double fit_t_max = 1.0;
  std::vector<double> pair_times{0.0, 0.1, 0.25, 0.5, 0.75, 1.0};
  double margin_tolerance = 0.02;
};

struct EstimatesConfig {
  int lorentz_samples = 50;
};

struct ExperimentConfig {
  int n = 64;
  double half_width = 16.0;
  HomogeneousData data;
  ModelKind model = ModelKind::toy1;
  std::vector<double> kappas{1.0, 4.0, 16.0, 64.0, 256.0};
  std::vector<double> mu_schedule = uniform_schedule(0.1);
  ProfileSolverOptions solver;
  double residual_tolerance = 1e-6;
  SemigroupConfig semigroup;
  EvolveConfig evolve;
  EstimatesConfig estimates;
  std::vector<std::string> stages = kAllStages;
  std::filesystem::path output = "selfsim_out";
  std::uint64_t seed = 20240601;
  // also write binary field dumps for every ladder member
  bool save_sweep_fields = false;

  GridSpec grid() const { return GridSpec(n, half_width); }
};

ExperimentConfig default_config();

// Raised for invalid configuration documents; `field` is the JSON path of the offender.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Missing keys keep their defaults; unknown keys and bad values throw ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

// Checks every range before any compute starts.
void validate(const ExperimentConfig& c);

}  // namespace selfsim::cli
