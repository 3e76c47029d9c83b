#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfsim/evolution.hpp"
#include "selfsim/kappa_limit.hpp"
#include "selfsim/profile_solver.hpp"
#include "selfsim_cli/config.hpp"

namespace selfsim::cli {

// Worker cap from SELFSIM_THREADS (default: hardware concurrency, at least 1).
int worker_count();

// Runs fn(0..count-1) on up to worker_count() threads. Results must be stored by index.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

struct StageRecord {
  std::string name;
  bool ok = true;
  std::string error;
  double seconds = 0.0;  // wall time; never written to disk
};

// In-memory products shared by the stages of one run.
struct RunContext {
  ExperimentConfig config;
  VectorField u0;
  std::optional<ProfileSolution> profile;
  std::optional<KappaSweepReport> sweep;
  std::optional<ConvergenceSummary> convergence;
  std::optional<Trajectory> trajectory;
  nlohmann::json semigroup, profile_report, sweep_report, estimates_report, evolve_report, summary;
  std::vector<StageRecord> stages;
};

// Executes config.stages in order, writing into config.output, and finishes
// with manifest.json listing every file under the output directory with its
// SHA-256. A failing stage is recorded and stops the run. Returns the
// context; check stages for failures.
RunContext run(const ExperimentConfig& config);

// Single stages (they compute missing prerequisites on demand).
void stage_semigroup_check(RunContext& ctx);
void stage_solve_profile(RunContext& ctx);
void stage_kappa_sweep(RunContext& ctx);
void stage_evolve(RunContext& ctx);
void stage_estimates(RunContext& ctx);
void stage_report(RunContext& ctx);

// Rewrites manifest.json from the files present under `dir`.
void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& config,
                    const std::vector<StageRecord>& stages);

// Writes JSON with a fixed layout (sorted keys, 2-space indent, trailing newline).
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace selfsim::cli
