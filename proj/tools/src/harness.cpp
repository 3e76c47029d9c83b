#include "selfsim_cli/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "selfsim/calculus.hpp"
#include "selfsim/estimates.hpp"
#include "selfsim/field_io.hpp"
#include "selfsim/lame_semigroup.hpp"
#include "selfsim/norms.hpp"

namespace selfsim::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

json fit_json(const DecayFit& f) {
  return {{"exponent", f.exponent}, {"confidence", f.confidence}, {"shells", f.shells},
          {"super_algebraic", f.super_algebraic}, {"radii", f.radii}, {"shell_max", f.shell_max}};
}

json margin_json(const MarginReport& m) {
  return {{"lhs", m.lhs}, {"rhs", m.rhs}, {"margin", m.margin}, {"scale", m.scale}, {"passed", m.passed}};
}

// Uniform in [0, 1) from the top 53 bits; independent of the standard library's distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

VectorField random_smooth(const GridSpec& g, std::mt19937_64& rng) {
  VectorField v(g);
  for (int c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < g.size(); ++i) {
      // Box-Muller
      const double a = unit(rng), b = unit(rng);
      v[c][i] = std::sqrt(-2.0 * std::log1p(-a)) * std::cos(2.0 * std::numbers::pi * b);
    }
  return apply_semigroup(v, {0.0, 0.3});
}

ProfileSolution& ensure_profile(RunContext& ctx);
KappaSweepReport& ensure_sweep(RunContext& ctx);

void ensure_u0(RunContext& ctx) {
  if (ctx.u0.size() == 0) ctx.u0 = build_field(ctx.config.data, ctx.config.grid());
}

json profile_json(const ProfileSolution& s, double residual_tolerance) {
  json j = {{"model", to_string(s.model)},
            {"kappa", s.kappa},
            {"mu", s.mu},
            {"converged", s.converged},
            {"iterations", s.iterations},
            {"fixed_point_residual", s.fixed_point_residual},
            {"residual_l2", s.residual_l2},
            {"residual_ok", s.residual_l2 <= residual_tolerance},
            {"x_norm", s.x_norm}};
  try {
    const DecayReport d = decay_report(s);
    j["decay"] = {{"value", fit_json(d.value)}, {"gradient", fit_json(d.gradient)}};
  } catch (const InsufficientRangeError& e) {
    j["decay"] = {{"error", e.what()}};
  }
  json hist = json::array();
  for (const auto& h : s.history)
    hist.push_back({{"mu", h.mu}, {"iterations", h.iterations}, {"residual", h.fixed_point_residual}, {"converged", h.converged}});
  j["history"] = hist;
  return j;
}

ProfileSolution& ensure_profile(RunContext& ctx) {
  if (!ctx.profile) {
    const auto& c = ctx.config;
    ctx.profile = solve_profile(c.data, c.grid(), c.kappas.front(), c.model, c.mu_schedule, c.solver);
  }
  return *ctx.profile;
}

KappaSweepReport& ensure_sweep(RunContext& ctx) {
  if (!ctx.sweep) {
    const auto& c = ctx.config;
    ctx.sweep = kappa_sweep(c.data, c.grid(), c.kappas, c.model, c.solver);
    if (ctx.sweep->solutions.size() >= 3) ctx.convergence = convergence_diagnostics(*ctx.sweep);
  }
  return *ctx.sweep;
}

void write_csv(const fs::path& path, const std::vector<std::string>& rows) {
  std::string text;
  for (const auto& r : rows) text += r + "\n";
  write_text(path, text);
}

}  // namespace

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("SELFSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 1024));
  }
  return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(worker_count()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void stage_semigroup_check(RunContext& ctx) {
  ensure_u0(ctx);
  const auto& sc = ctx.config.semigroup;
  const double scale = max_norm(ctx.u0);
  double deviation = 0.0;
  for (double t : sc.times) {
    const VectorField ref = apply_semigroup(ctx.u0, {sc.kappas.front(), t});
    for (std::size_t i = 1; i < sc.kappas.size(); ++i) {
      const double d = max_norm(apply_semigroup(ctx.u0, {sc.kappas[i], t}) - ref);
      deviation = std::max(deviation, scale > 0.0 ? d / scale : d);
    }
  }
  json fits = json::array();
  for (double k : sc.kappas) {
    const SmoothingFit f = check_smoothing_rate(ctx.u0, k, sc.s1, sc.s, sc.times);
    const WeakL3Report w = check_weak_l3_bound(ctx.u0, k, sc.times);
    fits.push_back({{"kappa", k},
                    {"slope", f.slope},
                    {"predicted_slope", f.predicted_slope},
                    {"confidence", f.confidence},
                    {"times", f.times},
                    {"norms", f.norms},
                    {"weak_l3_ratios", w.ratios},
                    {"weak_l3_max_ratio", w.max_ratio},
                    {"weak_l3_flagged", w.flagged}});
  }
  ctx.semigroup = {{"kappas", sc.kappas}, {"times", sc.times}, {"s1", sc.s1}, {"s", sc.s},
                   {"kappa_invariance_max_deviation", deviation}, {"smoothing", fits},
                   {"u0_weak_l3", weak_lorentz_norm(ctx.u0, 3.0)}};
  write_json(ctx.config.output / "semigroup.json", ctx.semigroup);
  std::cout << "kappa-invariance max deviation: " << num(deviation) << "\n";
}

void stage_solve_profile(RunContext& ctx) {
  const ProfileSolution& s = ensure_profile(ctx);
  save_profile(s, ctx.config.output / "profile");
  ctx.profile_report = profile_json(s, ctx.config.residual_tolerance);
  write_json(ctx.config.output / "profile" / "report.json", ctx.profile_report);
  std::cout << "profile " << to_string(s.model) << " kappa=" << s.kappa << " residual=" << num(s.residual_l2)
            << " iterations=" << s.iterations << "\n";
}

void stage_kappa_sweep(RunContext& ctx) {
  const KappaSweepReport& rep = ensure_sweep(ctx);
  const fs::path out = ctx.config.output;
  json members = json::array();
  std::vector<std::string> rows{"kappa,residual_l2,ns_residual,div_norm,pressure_sign,cauchy_l2,cauchy_h1"};
  for (std::size_t i = 0; i < rep.solutions.size(); ++i) {
    const auto& s = rep.solutions[i];
    json m = profile_json(s, ctx.config.residual_tolerance);
    m["ns_residual"] = rep.ns_residuals[i];
    m["pressure_sign"] = rep.pressures[i].sign;
    m["pressure_other_residual"] = rep.pressures[i].other_residual;
    m["div_norm"] = rep.div_norms[i];
    members.push_back(m);
    const std::string cl = i > 0 ? num(rep.cauchy_l2[i - 1]) : "";
    const std::string ch = i > 0 ? num(rep.cauchy_h1[i - 1]) : "";
    rows.push_back(num(s.kappa) + "," + num(s.residual_l2) + "," + num(rep.ns_residuals[i]) + "," +
                   num(rep.div_norms[i]) + "," + std::to_string(rep.pressures[i].sign) + "," + cl + "," + ch);
    if (ctx.config.save_sweep_fields) {
      const fs::path d = out / "sweep" / ("kappa_" + num(s.kappa));
      save_profile(s, d);
      save_field(rep.pressures[i].P, d / "P.bin");
    }
  }
  ctx.sweep_report = {{"model", to_string(rep.model)}, {"kappas", rep.kappas},     {"complete", rep.complete},
                      {"members", members},            {"cauchy_l2", rep.cauchy_l2}, {"cauchy_h1", rep.cauchy_h1},
                      {"pressure_cauchy", rep.pressure_cauchy}};
  if (!rep.complete) ctx.sweep_report["failure"] = {{"kappa", rep.failed_kappa}, {"message", rep.failure}};
  if (ctx.convergence) {
    const auto& c = *ctx.convergence;
    ctx.sweep_report["limit"] = {
        {"order_defined", c.order_defined},
        {"order", c.order},
        {"extrapolated_residual", c.extrapolated_residual},
        {"best_member_residual", c.best_member_residual},
        {"extrapolated_div_norm", l2_norm(divergence(c.U), Region::inner_half_box)},
        {"decay", c.decay_fitted ? fit_json(c.decay) : json(nullptr)},
        {"energy_gaps", c.energy_gaps},
        {"rescaling_error", c.rescaling_error},
        {"div_slope", c.div_slope},
        {"cauchy_decreasing", c.cauchy_decreasing},
        {"h1_decreasing", c.h1_decreasing},
        {"pressure_decreasing", c.pressure_decreasing},
        {"sign_consistent", c.sign_consistent}};
  }
  write_json(out / "sweep.json", ctx.sweep_report);
  write_csv(out / "sweep.csv", rows);
  std::cout << "sweep " << rep.solutions.size() << "/" << ctx.config.kappas.size() << " members"
            << (rep.complete ? "" : " (incomplete: " + rep.failure + ")") << "\n";
  if (!rep.complete) throw NonconvergenceError("kappa sweep failed at kappa = " + num(rep.failed_kappa), 0.0);
}

void stage_evolve(RunContext& ctx) {
  ensure_u0(ctx);
  const auto& ec = ctx.config.evolve;
  EvolveOptions opt = ec.options;
  opt.diagnostic_dir = ctx.config.output / "evolve";
  ctx.trajectory = evolve(ctx.u0, ec.kappa, ctx.config.model, opt);
  const Trajectory& tr = *ctx.trajectory;
  save_trajectory(tr, ctx.config.output / "evolve");

  const EnergyGrowthReport e = energy_growth_check(tr, ec.fit_t_min, ec.fit_t_max, ec.pair_times, ec.margin_tolerance);
  json pairs = json::array();
  for (const auto& p : e.turbulent_pairs) pairs.push_back({{"s", p.s}, {"t", p.t}, {"report", margin_json(p.report)}});
  json bumps = json::array();
  for (std::size_t i = 0; i < tr.bumps.size(); ++i) {
    const auto& b = tr.bumps[i];
    bumps.push_back({{"centre", {b.centre[0], b.centre[1], b.centre[2]}},
                     {"radius", b.radius},
                     {"t_start", b.t_start},
                     {"t_stop", b.t_stop},
                     {"report", margin_json(local_energy_check(tr, i, ec.margin_tolerance))}});
  }
  ctx.evolve_report = {{"kappa", ec.kappa},
                       {"model", to_string(ctx.config.model)},
                       {"steps", tr.step_times.size() - 1},
                       {"rejected_steps", tr.rejected_steps},
                       {"energy_slope", e.slope},
                       {"energy_fit_confidence", e.confidence},
                       {"c0_candidate", e.c0_candidate},
                       {"u0_weak_l3", e.u0_weak_l3},
                       {"fit_times", e.times},
                       {"fit_lhs", e.lhs},
                       {"turbulent_pairs", pairs},
                       {"turbulent_ok", e.turbulent_ok},
                       {"bumps", bumps}};
  // the first two stored snapshots after t = 0, if any, feed the self-similarity check
  const double limit = std::pow(ctx.config.half_width / 4.0, 2);
  if (tr.times.size() >= 3 && tr.times[2] <= limit)
    ctx.evolve_report["self_similarity"] = {{"t1", tr.times[1]}, {"t2", tr.times[2]},
                                            {"discrepancy", self_similarity_check(tr, 1, 2)}};
  write_json(ctx.config.output / "evolve.json", ctx.evolve_report);
  std::cout << "evolve steps=" << tr.step_times.size() - 1 << " energy slope=" << num(e.slope) << "\n";
}

void stage_estimates(RunContext& ctx) {
  ensure_u0(ctx);
  const KappaSweepReport& rep = ensure_sweep(ctx);
  const std::size_t m = rep.solutions.size();

  std::vector<BoundReport> bounds(m);
  std::vector<json> decay(m);
  parallel_for(m, [&](std::size_t i) {
    bounds[i] = uniform_bounds_report(rep.solutions[i], ctx.u0);
    try {
      const DecayReport d = decay_report(rep.solutions[i]);
      decay[i] = {{"value", d.value.exponent}, {"gradient", d.gradient.exponent}};
    } catch (const InsufficientRangeError& e) {
      decay[i] = {{"error", e.what()}};
    }
  });

  json members = json::array();
  std::vector<std::string> rows{"kappa,energy,penalty,hessian,energy_ratio,penalty_ratio,hessian_ratio"};
  std::map<std::string, std::pair<double, double>> range;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& b = bounds[i];
    members.push_back({{"kappa", b.kappa}, {"lhs", b.lhs}, {"rhs_scale", b.rhs_scale}, {"ratio", b.ratio}, {"decay", decay[i]}});
    rows.push_back(num(b.kappa) + "," + num(b.lhs.at("energy")) + "," + num(b.lhs.at("penalty")) + "," +
                   num(b.lhs.at("hessian")) + "," + num(b.ratio.at("energy")) + "," + num(b.ratio.at("penalty")) + "," +
                   num(b.ratio.at("hessian")));
    for (const auto& [name, r] : b.ratio) {
      auto [it, fresh] = range.try_emplace(name, r, r);
      if (!fresh) it->second = {std::min(it->second.first, r), std::max(it->second.second, r)};
    }
  }
  json variation = json::object();
  for (const auto& [name, mm] : range) variation[name] = mm.first > 0.0 ? mm.second / mm.first : 0.0;

  // Lorentz truncation on randomized (g, N, r, s, t)
  std::mt19937_64 rng(ctx.config.seed);
  const GridSpec g = ctx.config.grid();
  struct Tuple {
    int source;
    double N, r, s, t;
  };
  const int samples = ctx.config.estimates.lorentz_samples;
  std::vector<ScalarField> sources = {ctx.u0.magnitude(), random_smooth(g, rng).magnitude()};
  if (m > 0) sources.push_back(rep.solutions.back().W.magnitude());
  std::vector<double> peaks;
  for (const auto& f : sources) peaks.push_back(*std::max_element(f.values().begin(), f.values().end()));
  std::vector<Tuple> tuples;
  for (int i = 0; i < samples; ++i) {
    Tuple tp;
    tp.source = static_cast<int>(rng() % sources.size());
    tp.t = 1.05 + 1.5 * unit(rng);
    tp.r = tp.t + 0.1 + 2.0 * unit(rng);
    tp.s = tp.r + 0.1 + 4.0 * unit(rng);
    tp.N = peaks[tp.source] * std::pow(10.0, -2.0 + 2.2 * unit(rng));
    tuples.push_back(tp);
  }
  std::vector<LorentzMargins> margins(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t i) {
    const Tuple& tp = tuples[i];
    margins[i] = lorentz_split_check(sources[tp.source], tp.N, tp.r, tp.s, tp.t);
  });
  json lorentz = json::array();
  bool all_passed = true;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const auto& mg = margins[i];
    all_passed = all_passed && mg.passed;
    if (mg.scale > 0.0) worst = std::min(worst, std::min(mg.lower_margin, mg.upper_margin) / mg.scale);
    lorentz.push_back({{"source", tuples[i].source}, {"N", tuples[i].N}, {"r", tuples[i].r}, {"s", tuples[i].s},
                       {"t", tuples[i].t}, {"lower_margin", mg.lower_margin}, {"upper_margin", mg.upper_margin},
                       {"scale", mg.scale}, {"passed", mg.passed}});
  }

  // Cut level substituted into the truncated bound; the constant c is the
  // fitted envelope constant when an evolution is available.
  const double a = weak_lorentz_norm(ctx.u0, 3.0);
  double c = 1.0;
  if (ctx.evolve_report.contains("c0_candidate") && ctx.evolve_report["c0_candidate"].get<double>() > 0.0)
    c = ctx.evolve_report["c0_candidate"].get<double>();
  json envelope = json::array();
  if (a > 0.0)
    for (double t : {0.05, 0.1, 0.25, 0.5, 1.0}) {
      const double N = cut_level(c, t, a);
      envelope.push_back({{"t", t}, {"N", N}, {"bound_over_sqrt_t", truncated_energy_bound(c, t, a, N) / std::sqrt(t)}});
    }

  ctx.estimates_report = {{"members", members},
                          {"ratio_variation", variation},
                          {"lorentz", {{"samples", lorentz}, {"all_passed", all_passed},
                                       {"worst_relative_margin", std::isfinite(worst) ? json(worst) : json(nullptr)}}},
                          {"cut_level", {{"c", c}, {"u0_weak_l3", a}, {"envelope", envelope}}}};
  write_json(ctx.config.output / "estimates.json", ctx.estimates_report);
  write_csv(ctx.config.output / "bounds.csv", rows);
  std::cout << "estimates members=" << m << " lorentz " << (all_passed ? "ok" : "VIOLATED") << "\n";
}

void stage_report(RunContext& ctx) {
  const fs::path out = ctx.config.output;
  json summary = json::object();
  auto load = [&](const std::string& key, const fs::path& p) {
    if (!fs::exists(p)) return;
    std::ifstream in(p);
    summary[key] = json::parse(in);
  };
  load("semigroup", out / "semigroup.json");
  load("profile", out / "profile" / "report.json");
  load("sweep", out / "sweep.json");
  load("estimates", out / "estimates.json");
  load("evolve", out / "evolve.json");

  std::vector<std::string> decay_rows{"source,kappa,radius,value_shell_max,gradient_shell_max"};
  auto add_decay = [&](const std::string& source, const json& p) {
    if (!p.contains("decay") || !p["decay"].contains("value")) return;
    const auto& v = p["decay"]["value"];
    const auto& gr = p["decay"]["gradient"];
    for (std::size_t i = 0; i < v["radii"].size(); ++i)
      decay_rows.push_back(source + "," + num(p["kappa"].get<double>()) + "," + num(v["radii"][i].get<double>()) + "," +
                           num(v["shell_max"][i].get<double>()) + "," +
                           (i < gr["shell_max"].size() ? num(gr["shell_max"][i].get<double>()) : ""));
  };
  if (summary.contains("profile")) add_decay("profile", summary["profile"]);
  if (summary.contains("sweep"))
    for (const auto& m : summary["sweep"]["members"]) add_decay("sweep", m);

  std::vector<std::string> bound_rows{"kappa,energy_ratio,penalty_ratio,hessian_ratio"};
  if (summary.contains("estimates"))
    for (const auto& m : summary["estimates"]["members"])
      bound_rows.push_back(num(m["kappa"].get<double>()) + "," + num(m["ratio"]["energy"].get<double>()) + "," +
                           num(m["ratio"]["penalty"].get<double>()) + "," + num(m["ratio"]["hessian"].get<double>()));

  std::vector<std::string> energy_rows{"t,energy_plus_dissipation"};
  if (summary.contains("evolve")) {
    const auto& e = summary["evolve"];
    for (std::size_t i = 0; i < e["fit_times"].size(); ++i)
      energy_rows.push_back(num(e["fit_times"][i].get<double>()) + "," + num(e["fit_lhs"][i].get<double>()));
  }

  ctx.summary = summary;
  write_json(out / "summary.json", summary);
  if (decay_rows.size() > 1) write_csv(out / "decay_curves.csv", decay_rows);
  if (bound_rows.size() > 1) write_csv(out / "bound_ratios.csv", bound_rows);
  if (energy_rows.size() > 1) write_csv(out / "energy_vs_t.csv", energy_rows);
  std::cout << "report sections=" << summary.size() << "\n";
}

void write_manifest(const fs::path& dir, const ExperimentConfig& config, const std::vector<StageRecord>& stages) {
  fs::create_directories(dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(fs::relative(e.path(), dir));
  std::sort(files.begin(), files.end());
  json list = json::object();
  for (const auto& f : files) list[f.generic_string()] = sha256_file(dir / f);
  json st = json::array();
  for (const auto& s : stages) {
    json r = {{"name", s.name}, {"status", s.ok ? "ok" : "failed"}};
    if (!s.ok) r["error"] = s.error;
    st.push_back(r);
  }
  const std::string cfg = config_to_json(config).dump();
  write_json(dir / "manifest.json",
             {{"config", config_to_json(config)},
              {"config_sha256", sha256_hex({reinterpret_cast<const unsigned char*>(cfg.data()), cfg.size()})},
              {"stages", st},
              {"files", list}});
}

RunContext run(const ExperimentConfig& config) {
  validate(config);
  RunContext ctx;
  ctx.config = config;
  fs::create_directories(config.output);
  write_json(config.output / "config.json", config_to_json(config));
  for (const std::string& name : config.stages) {
    StageRecord rec{name};
    const auto start = std::chrono::steady_clock::now();
    try {
      if (name == "semigroup-check") stage_semigroup_check(ctx);
      else if (name == "solve-profile") stage_solve_profile(ctx);
      else if (name == "kappa-sweep") stage_kappa_sweep(ctx);
      else if (name == "evolve") stage_evolve(ctx);
      else if (name == "estimates") stage_estimates(ctx);
      else if (name == "report") stage_report(ctx);
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ctx.stages.push_back(rec);
    if (!rec.ok) {
      std::cerr << "stage " << name << " failed: " << rec.error << "\n";
      break;
    }
  }
  write_manifest(config.output, config, ctx.stages);
  return ctx;
}

}  // namespace selfsim::cli
