// homeodyn: simulate the bundled oscillator models, sweep input parameters
// into chair curves, compute fast-subsystem bifurcation diagrams, and rerun
// the canned figure recipes.  Exit codes: 0 ok, 1 config error, 2 numerical
// failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homeodyn/analysis.hpp"
#include "homeodyn/bifurcation.hpp"
#include "homeodyn/distributions.hpp"
#include "homeodyn/integrator.hpp"
#include "homeodyn/io.hpp"
#include "homeodyn/models.hpp"
#include "homeodyn/noise.hpp"

namespace fs = std::filesystem;
using namespace homeodyn;

namespace {

constexpr const char* k_version = "0.1.0";

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<double> discard;
  int workers = 0;  // 0 = all hardware threads
  std::string out_dir = "out";
};

struct Range {
  double lo = 0.0, hi = 0.0, step = 0.0;
};

Range parse_range(const std::string& text) {
  Range r;
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ConfigError("range '" + text + "': expected lo:hi:step");
  r.lo = config_double("range lo", text.substr(0, c1));
  r.hi = config_double("range hi", text.substr(c1 + 1, c2 - c1 - 1));
  r.step = config_double("range step", text.substr(c2 + 1));
  return r;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

std::string default_noise_target(const ModelSystem& sys) {
  switch (sys.kind()) {
    case ModelKind::fhn: return "J";
    case ModelKind::chay_keizer: return "kc";
    case ModelKind::pbm: return "";  // no canonical noisy input; must be explicit
  }
  return "";
}

ConfigMap load_config(const GlobalOpts& g) {
  if (g.config_path.empty()) return {};
  return parse_config_file(g.config_path);
}

// defaults < config file < --set flags
ModelSystem build_system(const std::string& model_arg, const ConfigMap& cfg,
                         const std::vector<std::string>& sets) {
  std::string name = model_arg;
  if (name.empty()) {
    const auto it = cfg.find("model");
    if (it == cfg.end()) throw ConfigError("no model given (argument or config 'model=')");
    name = it->second;
  }
  ModelSystem sys = ModelSystem::make(name);
  check_known_keys(sys, cfg);
  apply_param_overrides(sys, cfg);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    sys.set_param(key, config_double(key, kv.substr(eq + 1)));
  }
  sys.validate();
  for (const auto& w : sys.warnings()) std::cerr << "warning: " << w << "\n";
  return sys;
}

std::optional<NoiseProcess> resolve_noise(const ModelSystem& sys, const ConfigMap& cfg,
                                          const std::string& noise_spec,
                                          const std::optional<std::uint64_t>& seed) {
  std::optional<NoiseProcess> proc;
  if (!noise_spec.empty())
    proc = parse_noise_spec(noise_spec, default_noise_target(sys));
  else
    proc = noise_from_config(cfg, default_noise_target(sys));
  if (proc) {
    (void)sys.get_param(proc->target);  // reject targets unknown to this model
    if (seed) proc->seed = *seed;
  }
  return proc;
}

void add_params_to_manifest(ConfigMap& resolved, const ModelSystem& sys) {
  resolved["model"] = std::string(sys.name());
  for (const auto& name : sys.param_names())
    resolved[name] = format_g17(sys.get_param(name));
}

void add_noise_to_manifest(ConfigMap& resolved, const NoiseProcess& p) {
  resolved["noise.target"] = p.target;
  resolved["noise.dist"] = std::string(to_string(p.dist));
  if (p.mean) resolved["noise.mean"] = format_g17(*p.mean);
  resolved["noise.sigma"] = format_g17(p.sigma);
  resolved["noise.refresh"] = format_g17(p.refresh_interval);
  resolved["noise.seed"] = std::to_string(p.seed);
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  fill(os);
  if (!os) throw ConfigError("write failed for '" + path.string() + "'");
}

void finish_run(const fs::path& dir, RunManifest m) {
  write_file(dir / "manifest.json", [&](std::ostream& os) { write_manifest(os, m); });
  for (const auto& f : m.outputs) std::cout << (dir / f).string() << "\n";
  std::cout << (dir / "manifest.json").string() << "\n";
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateSpec {
  Method method = Method::rk4;
  double dt = 0.0;
  double t_end = 0.0;
  double discard = 0.0;
  std::int64_t record_stride = 0;  // 0 = clamp output to ~1e6 samples
  std::optional<NoiseProcess> noise;
  std::vector<double> x0;  // empty = model default
};

Trajectory run_simulation(const ModelSystem& sys, const SimulateSpec& spec) {
  Trajectory traj;
  std::visit(
      [&](auto model) {
        using System = std::decay_t<decltype(model)>;
        typename System::State x0 = model.default_x0();
        if (!spec.x0.empty()) {
          if (spec.x0.size() != x0.size())
            throw ConfigError("--x0 needs " + std::to_string(x0.size()) + " values");
          for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = spec.x0[i];
        }
        const std::int64_t n_total = step_count(spec.discard + spec.t_end, spec.dt);
        std::int64_t stride = spec.record_stride;
        if (stride <= 0) stride = std::max<std::int64_t>(1, (n_total + 999999) / 1000000);

        Simulation<System> sim(model, spec.method, spec.dt, x0);
        if (spec.noise) sim.attach_noise(*spec.noise, spec.noise->seed);
        sim.advance(spec.discard);

        traj.t0 = sim.time();
        traj.dt = spec.dt * static_cast<double>(stride);
        traj.labels.assign(System::state_labels.begin(), System::state_labels.end());
        traj.cols.resize(x0.size());
        const auto& s0 = sim.state();
        for (std::size_t i = 0; i < s0.size(); ++i) traj.cols[i].push_back(s0[i]);
        sim.advance(spec.t_end, stride, [&](double, const typename System::State& s) {
          for (std::size_t i = 0; i < s.size(); ++i) traj.cols[i].push_back(s[i]);
        });
      },
      sys.model);
  return traj;
}

double default_sim_t_end(const ModelSystem& sys) {
  switch (sys.kind()) {
    case ModelKind::fhn: return 100.0;
    case ModelKind::chay_keizer: return 4e4;
    case ModelKind::pbm: return 1.8e6;
  }
  return 100.0;
}

struct SimulateArgs {
  std::string model;
  std::vector<std::string> sets;
  std::string noise_spec;
  std::string method = "rk4";
  std::string x0_csv;
  std::int64_t record_stride = 0;
};

int cmd_simulate(const GlobalOpts& g, const SimulateArgs& a,
                 const std::vector<std::string>& argv) {
  const ConfigMap cfg = load_config(g);
  ModelSystem sys = build_system(a.model, cfg, a.sets);

  SimulateSpec spec;
  std::string method_name = a.method;
  if (auto it = cfg.find("integrator.method"); it != cfg.end() && a.method == "rk4")
    method_name = it->second;
  spec.method = parse_method(method_name);
  spec.dt = g.dt ? *g.dt : 0.0;
  if (spec.dt <= 0.0)
    if (auto it = cfg.find("integrator.dt"); it != cfg.end())
      spec.dt = config_double(it->first, it->second);
  if (spec.dt <= 0.0) spec.dt = default_dt(sys, spec.method);
  spec.t_end = g.t_end ? *g.t_end : 0.0;
  if (spec.t_end <= 0.0)
    if (auto it = cfg.find("integrator.t_end"); it != cfg.end())
      spec.t_end = config_double(it->first, it->second);
  if (spec.t_end <= 0.0) spec.t_end = default_sim_t_end(sys);
  spec.discard = g.discard ? *g.discard : 0.0;
  spec.record_stride = a.record_stride;
  if (spec.record_stride == 0)
    if (auto it = cfg.find("integrator.record_stride"); it != cfg.end())
      spec.record_stride = config_int(it->first, it->second);
  spec.noise = resolve_noise(sys, cfg, a.noise_spec, g.seed);
  if (!a.x0_csv.empty())
    for (const auto& tok : split_csv(a.x0_csv)) spec.x0.push_back(config_double("x0", tok));

  const Trajectory traj = run_simulation(sys, spec);

  const fs::path dir(g.out_dir);
  fs::create_directories(dir);
  write_file(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });

  RunManifest m;
  m.command = "simulate";
  m.argv = argv;
  m.version = k_version;
  if (spec.noise) m.seed = spec.noise->seed;
  add_params_to_manifest(m.resolved, sys);
  m.resolved["integrator.method"] = std::string(to_string(spec.method));
  m.resolved["integrator.dt"] = format_g17(spec.dt);
  m.resolved["integrator.t_end"] = format_g17(spec.t_end);
  m.resolved["integrator.discard"] = format_g17(spec.discard);
  if (spec.noise) add_noise_to_manifest(m.resolved, *spec.noise);
  m.outputs = {"trajectory.csv"};
  finish_run(dir, std::move(m));
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string model;
  std::string input;
  std::string range;
  std::string observe;
  std::vector<std::string> sets;
  std::string noise_spec;
  std::string method = "rk4";
  std::optional<double> window;
  std::optional<double> duty_threshold;
  bool warm_start = false;
  std::string seat_slope_range;     // "lo:hi"
  std::optional<double> interval_delta;
};

// restrict the averages columns to the requested observables
ChairCurve select_observables(const ChairCurve& curve, const std::vector<std::string>& obs) {
  if (obs.empty()) return curve;
  std::vector<std::size_t> idx;
  for (const auto& name : obs) idx.push_back(curve.label_index(name));
  ChairCurve out = curve;
  out.labels = obs;
  for (auto& pt : out.points) {
    std::vector<double> kept;
    for (std::size_t i : idx)
      kept.push_back(i < pt.averages.size() ? pt.averages[i]
                                            : std::numeric_limits<double>::quiet_NaN());
    pt.averages = std::move(kept);
  }
  return out;
}

int cmd_sweep(const GlobalOpts& g, const SweepArgs& a, const std::vector<std::string>& argv) {
  const ConfigMap cfg = load_config(g);
  ModelSystem sys = build_system(a.model, cfg, a.sets);
  (void)sys.get_param(a.input);

  SweepConfig sc;
  const Range r = parse_range(a.range);
  sc.lo = r.lo;
  sc.hi = r.hi;
  sc.step = r.step;
  std::string method_name = a.method;
  if (auto it = cfg.find("integrator.method"); it != cfg.end() && a.method == "rk4")
    method_name = it->second;
  sc.method = parse_method(method_name);
  if (g.dt) sc.dt = *g.dt;
  else if (auto it = cfg.find("integrator.dt"); it != cfg.end())
    sc.dt = config_double(it->first, it->second);
  if (g.discard) sc.transient_discard = *g.discard;
  else if (auto it = cfg.find("sweep.discard"); it != cfg.end())
    sc.transient_discard = config_double(it->first, it->second);
  if (a.window) sc.averaging_window = *a.window;
  else if (auto it = cfg.find("sweep.window"); it != cfg.end())
    sc.averaging_window = config_double(it->first, it->second);
  sc.noise = resolve_noise(sys, cfg, a.noise_spec, g.seed);
  sc.duty_threshold = a.duty_threshold;
  sc.warm_start = a.warm_start;
  if (auto it = cfg.find("sweep.warm_start"); it != cfg.end() && !a.warm_start)
    sc.warm_start = config_bool(it->first, it->second);
  sc.workers = g.workers;

  const ChairCurve curve = chair_sweep(sys, a.input, sc);

  // warn when the averaging window resolves fewer than ~10 cycles somewhere
  {
    double worst = 0.0, at = 0.0;
    for (const auto& pt : curve.points)
      if (pt.error.empty() && pt.period > worst) {
        worst = pt.period;
        at = pt.input;
      }
    const double window_used =
        sc.averaging_window > 0.0 ? sc.averaging_window : default_averaging_window(sys);
    if (worst > 0.0 && window_used < 10.0 * worst)
      std::cerr << "warning: averaging window " << window_used << " is under 10 periods ("
                << worst << " at " << a.input << "=" << at << ")\n";
  }

  const std::vector<std::string> obs = a.observe.empty() ? std::vector<std::string>{}
                                                         : split_csv(a.observe);
  const ChairCurve out_curve = select_observables(curve, obs);

  const fs::path dir(g.out_dir);
  fs::create_directories(dir);
  const std::string csv_name = "sweep_" + std::string(sys.name()) + "_" + a.input + ".csv";
  write_file(dir / csv_name, [&](std::ostream& os) {
    write_chair_csv(os, out_curve);
    if (!a.seat_slope_range.empty()) {
      const auto colon = a.seat_slope_range.find(':');
      if (colon == std::string::npos)
        throw ConfigError("--seat-slope expects lo:hi, got '" + a.seat_slope_range + "'");
      const double lo = config_double("seat-slope lo", a.seat_slope_range.substr(0, colon));
      const double hi = config_double("seat-slope hi", a.seat_slope_range.substr(colon + 1));
      for (const auto& name : out_curve.labels)
        os << "# seat_slope," << name << "," << format_g17(lo) << "," << format_g17(hi)
           << "," << format_g17(seat_slope(curve, name, lo, hi)) << "\n";
    }
    if (a.interval_delta) {
      // reference = the same sweep with the noise stripped; a deterministic
      // sweep degenerates to its own oscillation band
      ChairCurve det = curve;
      if (sc.noise) {
        SweepConfig det_cfg = sc;
        det_cfg.noise.reset();
        det = chair_sweep(sys, a.input, det_cfg);
      }
      const std::string slow = sys.slow_label();
      const auto iv = oscillation_interval_length(curve, det, slow, *a.interval_delta);
      os << "# oscillation_interval," << slow << "," << format_g17(*a.interval_delta) << ",";
      if (iv.found)
        os << format_g17(iv.left) << "," << format_g17(iv.right) << ","
           << format_g17(iv.length) << "\n";
      else
        os << "none,none,0\n";
    }
  });

  RunManifest m;
  m.command = "sweep";
  m.argv = argv;
  m.version = k_version;
  if (sc.noise) m.seed = sc.noise->seed;
  add_params_to_manifest(m.resolved, sys);
  m.resolved["sweep.input"] = a.input;
  m.resolved["sweep.lo"] = format_g17(sc.lo);
  m.resolved["sweep.hi"] = format_g17(sc.hi);
  m.resolved["sweep.step"] = format_g17(sc.step);
  m.resolved["integrator.method"] = std::string(to_string(sc.method));
  m.resolved["integrator.dt"] =
      format_g17(sc.dt > 0.0 ? sc.dt : default_dt(sys, sc.method));
  m.resolved["sweep.discard"] = format_g17(
      sc.transient_discard >= 0.0 ? sc.transient_discard : default_transient_discard(sys));
  m.resolved["sweep.window"] = format_g17(
      sc.averaging_window > 0.0 ? sc.averaging_window : default_averaging_window(sys));
  m.resolved["sweep.warm_start"] = sc.warm_start ? "true" : "false";
  if (sc.noise) add_noise_to_manifest(m.resolved, *sc.noise);
  m.outputs = {csv_name};
  finish_run(dir, std::move(m));
  return 0;
}

// ---------------------------------------------------------------------------
// bifurcate
// ---------------------------------------------------------------------------

struct BifurcateArgs {
  std::string model;
  std::vector<std::string> sets;
  std::string alpha_range = "1:5:0.05";
  std::optional<double> dv;
  std::optional<double> c_max;
};

int cmd_bifurcate(const GlobalOpts& g, const BifurcateArgs& a,
                  const std::vector<std::string>& argv) {
  const ConfigMap cfg = load_config(g);
  ModelSystem sys = build_system(a.model, cfg, a.sets);

  const fs::path dir(g.out_dir);
  fs::create_directories(dir);

  RunManifest m;
  m.command = "bifurcate";
  m.argv = argv;
  m.version = k_version;
  add_params_to_manifest(m.resolved, sys);

  if (sys.kind() == ModelKind::fhn) {
    const Range r = parse_range(a.alpha_range);
    const auto& p = std::get<Fhn>(sys.model).p;
    const auto locus = fhn_hopf_locus(p, r.lo, r.hi, r.step);
    write_file(dir / "hopf_locus.csv", [&](std::ostream& os) {
      os << "alpha,j_minus,j_plus\n";
      for (const auto& row : locus)
        os << format_g17(row.alpha) << "," << format_g17(row.j_minus) << ","
           << format_g17(row.j_plus) << "\n";
    });
    m.resolved["bifurcate.alpha"] = a.alpha_range;
    m.outputs = {"hopf_locus.csv"};
  } else if (sys.kind() == ModelKind::chay_keizer) {
    FastDiagramConfig fd;
    if (a.dv) fd.dv = *a.dv;
    if (a.c_max) fd.c_max = *a.c_max;
    const auto& p = std::get<ChayKeizer>(sys.model).p;
    const FastDiagram diagram = ck_fast_diagram(p, fd);
    write_file(dir / "fast_diagram.csv",
               [&](std::ostream& os) { write_fast_diagram_csv(os, diagram); });
    m.resolved["bifurcate.dv"] = format_g17(fd.dv);
    m.resolved["bifurcate.c_max"] = format_g17(fd.c_max);
    m.outputs = {"fast_diagram.csv"};
  } else {
    throw ConfigError("bifurcate supports fhn and chay-keizer");
  }
  finish_run(dir, std::move(m));
  return 0;
}

// ---------------------------------------------------------------------------
// reproduce: canned per-figure recipes with pinned seeds
// ---------------------------------------------------------------------------

constexpr std::uint64_t k_recipe_seed = 20250814;

struct Recipe {
  const char* id;
  const char* what;
  std::function<void(const fs::path&, const GlobalOpts&, bool full,
                     std::vector<std::string>&)>
      run;
};

void emit_trajectory(const fs::path& dir, const std::string& name, const ModelSystem& sys,
                     const SimulateSpec& spec, std::vector<std::string>& outputs,
                     const std::vector<std::string>& avg_vars = {}) {
  const Trajectory traj = run_simulation(sys, spec);
  write_file(dir / name, [&](std::ostream& os) {
    write_trajectory_csv(os, traj);
    for (const auto& v : avg_vars)
      os << "# time_average," << v << "," << format_g17(time_average(traj, v)) << "\n";
  });
  outputs.push_back(name);
}

void emit_chair(const fs::path& dir, const std::string& name, const ModelSystem& sys,
                const std::string& input, const SweepConfig& sc,
                std::vector<std::string>& outputs,
                const std::function<void(std::ostream&, const ChairCurve&)>& extra = {}) {
  const ChairCurve curve = chair_sweep(sys, input, sc);
  write_file(dir / name, [&](std::ostream& os) {
    write_chair_csv(os, curve);
    if (extra) extra(os, curve);
  });
  outputs.push_back(name);
}

ModelSystem make_with(const std::string& name, const std::vector<std::pair<std::string, double>>& sets) {
  ModelSystem sys = ModelSystem::make(name);
  for (const auto& [k, v] : sets) sys.set_param(k, v);
  return sys;
}

// planar-model trajectory panels: sub/super-threshold responses and
// relaxation oscillation at two inputs
void recipe_fig2(const fs::path& dir, const GlobalOpts& g, bool, std::vector<std::string>& out) {
  (void)g;
  for (const double J : {1.0, 0.0}) {
    ModelSystem sys = make_with("fhn", {{"alpha", 1.0}, {"J", J}});
    SimulateSpec spec;
    spec.dt = 1e-4;
    spec.t_end = 100.0;
    emit_trajectory(dir, "fig2_J" + format_g17(J) + ".csv", sys, spec, out);
  }
}

// slow-variable semi-invariance: time series at J=0 and J=0.8 with averages
void recipe_fig3(const fs::path& dir, const GlobalOpts& g, bool, std::vector<std::string>& out) {
  (void)g;
  for (const double J : {0.0, 0.8}) {
    ModelSystem sys = make_with("fhn", {{"alpha", 2.0}, {"J", J}});
    SimulateSpec spec;
    spec.dt = 1e-4;
    spec.discard = 200.0;
    spec.t_end = 100.0;
    emit_trajectory(dir, "fig3_J" + format_g17(J) + ".csv", sys, spec, out, {"x", "y"});
  }
}

SweepConfig fhn_chair_protocol() {
  SweepConfig sc;
  sc.lo = -3.0;
  sc.hi = 3.0;
  sc.step = 0.05;
  sc.dt = 1e-4;
  return sc;
}

void recipe_fig4(const fs::path& dir, const GlobalOpts& g, bool, std::vector<std::string>& out) {
  SweepConfig sc = fhn_chair_protocol();
  sc.workers = g.workers;
  emit_chair(dir, "fig4_chair.csv", make_with("fhn", {{"alpha", 2.0}}), "J", sc, out);
}

void recipe_fig5(const fs::path& dir, const GlobalOpts& g, bool, std::vector<std::string>& out) {
  SweepConfig sc = fhn_chair_protocol();
  sc.workers = g.workers;
  sc.duty_threshold = 0.0;
  emit_chair(dir, "fig5_duty.csv", make_with("fhn", {{"alpha", 2.0}}), "J", sc, out);
  for (const double J : {0.0, 0.8}) {
    ModelSystem sys = make_with("fhn", {{"alpha", 2.0}, {"J", J}});
    SimulateSpec spec;
    spec.dt = 1e-4;
    spec.discard = 200.0;
    spec.t_end = 100.0;
    emit_trajectory(dir, "fig5_J" + format_g17(J) + ".csv", sys, spec, out, {"x"});
  }
}

// chair curves at two feedback strengths plus the two-parameter Hopf locus
void recipe_fig6(const fs::path& dir, const GlobalOpts& g, bool, std::vector<std::string>& out) {
  for (const double alpha : {2.0, 4.0}) {
    SweepConfig sc = fhn_chair_protocol();
    sc.workers = g.workers;
    emit_chair(dir, "fig6_chair_alpha" + format_g17(alpha) + ".csv",
               make_with("fhn", {{"alpha", alpha}}), "J", sc, out);
  }
  const auto locus = fhn_hopf_locus(FhnParams{}, 1.0, 5.0, 0.05);
  write_file(dir / "fig6_hopf_locus.csv", [&](std::ostream& os) {
    os << "alpha,j_minus,j_plus\n";
    for (const auto& row : locus)
      os << format_g17(row.alpha) << "," << format_g17(row.j_minus) << ","
         << format_g17(row.j_plus) << "\n";
  });
  out.push_back("fig6_hopf_locus.csv");
}

// noisy-input chair curves; the stochastic protocol (forward Euler with the
// input redrawn every step) applies at sigma > 0
void fig7_curves(const fs::path& dir, const GlobalOpts& g, double alpha,
                 std::vector<std::string>& out, std::ostream& summary) {
  const std::uint64_t seed = g.seed ? *g.seed : k_recipe_seed;
  ModelSystem sys = make_with("fhn", {{"alpha", alpha}});
  const auto hopf = fhn_hopf_points(std::get<Fhn>(sys.model).p);

  ChairCurve det;
  for (const double sigma : {0.0, 10.0, 20.0, 30.0}) {
    SweepConfig sc = fhn_chair_protocol();
    sc.workers = g.workers;
    if (sigma > 0.0) {
      sc.method = Method::forward_euler;
      NoiseProcess np;
      np.target = "J";
      np.dist = NoiseDist::normal;
      np.sigma = sigma;
      np.refresh_interval = sc.dt;  // redraw every step
      np.seed = seed;
      sc.noise = np;
    }
    const ChairCurve curve = chair_sweep(sys, "J", sc);
    const std::string name = "fig7_alpha" + format_g17(alpha) + "_sigma" +
                             format_g17(sigma) + ".csv";
    write_file(dir / name, [&](std::ostream& os) { write_chair_csv(os, curve); });
    out.push_back(name);
    if (sigma == 0.0) det = curve;

    const double slope = seat_slope(curve, "y", hopf.j_minus, hopf.j_plus);
    const auto iv = oscillation_interval_length(curve, det, "y", 0.03);
    summary << format_g17(alpha) << "," << format_g17(sigma) << "," << format_g17(slope)
            << "," << (iv.found ? format_g17(iv.left) : "nan") << ","
            << (iv.found ? format_g17(iv.right) : "nan") << ","
            << (iv.found ? format_g17(iv.length) : "0") << "," << seed << "\n";
  }
}

void recipe_fig7(const fs::path& dir, const GlobalOpts& g, bool full,
                 std::vector<std::string>& out) {
  std::ostringstream summary;
  summary << "alpha,sigma,seat_slope,interval_left,interval_right,interval_length,seed\n";
  if (full) {
    for (const double alpha : {1.5, 2.0, 2.5, 3.0, 3.5, 4.0})
      fig7_curves(dir, g, alpha, out, summary);
  } else {
    fig7_curves(dir, g, 2.5, out, summary);
  }
  write_file(dir / "fig7_summary.csv",
             [&](std::ostream& os) { os << summary.str(); });
  out.push_back("fig7_summary.csv");
}

void recipe_fig8(const fs::path& dir, const GlobalOpts& g, bool, std::vector<std::string>& out) {
  (void)g;
  ModelSystem sys = ModelSystem::make("chay-keizer");
  SimulateSpec spec;
  spec.dt = 0.05;
  spec.discard = 1e5;
  spec.t_end = 4e4;
  spec.record_stride = 10;  // 0.5 ms sampling resolves the spikes
  emit_trajectory(dir, "fig8_burst.csv", sys, spec, out);
}

void recipe_fig9(const fs::path& dir, const GlobalOpts& g, bool, std::vector<std::string>& out) {
  (void)g;
  ModelSystem sys = ModelSystem::make("chay-keizer");
  const auto& p = std::get<ChayKeizer>(sys.model).p;
  const FastDiagram diagram = ck_fast_diagram(p);
  write_file(dir / "fig9_diagram.csv",
             [&](std::ostream& os) { write_fast_diagram_csv(os, diagram); });
  out.push_back("fig9_diagram.csv");

  // c-nullcline: c' = 0 at c = -(beta/kc) ICa(V), independent of w
  write_file(dir / "fig9_cnull.csv", [&](std::ostream& os) {
    os << "V,c\n";
    for (double v = -74.0; v <= -10.0 + 1e-9; v += 0.25) {
      const double ica = p.gCa * boltzmann(v, p.vm, p.sm) * (v - p.VCa);
      os << format_g17(v) << "," << format_g17(-p.beta * ica / p.kc) << "\n";
    }
  });
  out.push_back("fig9_cnull.csv");

  SimulateSpec spec;
  spec.dt = 0.05;
  spec.discard = 1e5;
  spec.t_end = 4e4;
  spec.record_stride = 10;
  emit_trajectory(dir, "fig9_trajectory.csv", sys, spec, out);
}

SweepConfig ck_chair_protocol() {
  SweepConfig sc;
  sc.lo = 0.01;
  sc.hi = 0.15;
  sc.step = 0.002;
  return sc;
}

void recipe_fig10(const fs::path& dir, const GlobalOpts& g, bool,
                  std::vector<std::string>& out) {
  SweepConfig sc = ck_chair_protocol();
  sc.workers = g.workers;
  emit_chair(dir, "fig10_chair.csv", ModelSystem::make("chay-keizer"), "kc", sc, out);
  for (const double kc : {0.05, 0.09}) {
    ModelSystem sys = make_with("chay-keizer", {{"kc", kc}});
    SimulateSpec spec;
    spec.dt = 0.05;
    spec.discard = 2e5;
    spec.t_end = 6e4;
    spec.record_stride = 10;
    emit_trajectory(dir, "fig10_ts_kc" + format_g17(kc) + ".csv", sys, spec, out, {"c"});
  }
}

void recipe_fig11(const fs::path& dir, const GlobalOpts& g, bool,
                  std::vector<std::string>& out) {
  SweepConfig sc = ck_chair_protocol();
  sc.workers = g.workers;
  sc.duty_threshold = -40.0;
  emit_chair(dir, "fig11_duty.csv", ModelSystem::make("chay-keizer"), "kc", sc, out);
  for (const double kc : {0.05, 0.09}) {
    ModelSystem sys = make_with("chay-keizer", {{"kc", kc}});
    SimulateSpec spec;
    spec.dt = 0.05;
    spec.discard = 2e5;
    spec.t_end = 6e4;
    spec.record_stride = 10;
    emit_trajectory(dir, "fig11_ts_kc" + format_g17(kc) + ".csv", sys, spec, out, {"V"});
  }
}

// deterministic vs folded-normal pump rate; effective input column gives the
// realized mean pump rate
void recipe_fig12(const fs::path& dir, const GlobalOpts& g, bool,
                  std::vector<std::string>& out) {
  const std::uint64_t seed = g.seed ? *g.seed : k_recipe_seed;
  ModelSystem sys = ModelSystem::make("chay-keizer");

  SweepConfig det_cfg = ck_chair_protocol();
  det_cfg.workers = g.workers;
  const ChairCurve det = chair_sweep(sys, "kc", det_cfg);
  write_file(dir / "fig12_chair_det.csv",
             [&](std::ostream& os) { write_chair_csv(os, det); });
  out.push_back("fig12_chair_det.csv");

  SweepConfig st_cfg = det_cfg;
  NoiseProcess np;
  np.target = "kc";
  np.dist = NoiseDist::folded_normal;
  np.sigma = 0.04;
  np.refresh_interval = 1000.0;
  np.seed = seed;
  st_cfg.noise = np;
  const ChairCurve stoch = chair_sweep(sys, "kc", st_cfg);
  write_file(dir / "fig12_chair_stoch.csv", [&](std::ostream& os) {
    write_chair_csv(os, stoch);
    const auto iv_d = oscillation_interval_length(det, det, "c", 0.01);
    const auto iv_s = oscillation_interval_length(stoch, det, "c", 0.01);
    os << "# oscillation_interval,c,det," << format_g17(iv_d.length) << ",stoch,"
       << format_g17(iv_s.length) << ",seed," << seed << "\n";
  });
  out.push_back("fig12_chair_stoch.csv");

  for (const double kc : {0.036, 0.126}) {
    ModelSystem ms = make_with("chay-keizer", {{"kc", kc}});
    SimulateSpec spec;
    spec.dt = 0.05;
    spec.discard = 7e5;
    spec.t_end = 6e4;
    spec.record_stride = 10;
    emit_trajectory(dir, "fig12_ts_kc" + format_g17(kc) + ".csv", ms, spec, out);
  }
}

// slow-bursting regime: the ADP/ATP ratio averages nearly coincide while the
// Ca averages separate
void recipe_fig13(const fs::path& dir, const GlobalOpts& g, bool,
                  std::vector<std::string>& out) {
  (void)g;
  for (const double r : {0.18, 0.26}) {
    ModelSystem sys = make_with("pbm", {{"gKCa", 25.0}, {"r", r}});
    SimulateSpec spec;
    spec.dt = 0.05;
    spec.discard = 1.8e6;
    spec.t_end = 1.8e6;
    spec.record_stride = 100;
    emit_trajectory(dir, "fig13_r" + format_g17(r) + ".csv", sys, spec, out,
                    {"a", "c", "V"});
  }
}

// fast-bursting regime: Ca averages nearly coincide while a separates
void recipe_fig14(const fs::path& dir, const GlobalOpts& g, bool,
                  std::vector<std::string>& out) {
  (void)g;
  for (const double kpmca : {0.1, 0.15}) {
    ModelSystem sys = make_with("pbm", {{"gKCa", 600.0}, {"kPMCA", kpmca}});
    SimulateSpec spec;
    spec.dt = 0.05;
    spec.discard = 2e5;
    spec.t_end = 1.2e5;
    spec.record_stride = 20;
    emit_trajectory(dir, "fig14_kPMCA" + format_g17(kpmca) + ".csv", sys, spec, out,
                    {"a", "c", "V"});
  }
}

const std::vector<Recipe>& recipes() {
  static const std::vector<Recipe> table = {
      {"fig2", "planar-model threshold responses and relaxation oscillation", recipe_fig2},
      {"fig3", "slow-variable semi-invariance time series", recipe_fig3},
      {"fig4", "chair curve over the input range", recipe_fig4},
      {"fig5", "fast-variable averages and duty cycle", recipe_fig5},
      {"fig6", "feedback-strength dependence and Hopf locus", recipe_fig6},
      {"fig7", "noisy-input chair curves, seat slopes and intervals", recipe_fig7},
      {"fig8", "bursting time series at table parameters", recipe_fig8},
      {"fig9", "fast-subsystem bifurcation diagram with burst overlay", recipe_fig9},
      {"fig10", "Ca chair curve over the pump rate", recipe_fig10},
      {"fig11", "membrane-potential averages and burst duty cycle", recipe_fig11},
      {"fig12", "deterministic vs stochastic pump-rate chair curves", recipe_fig12},
      {"fig13", "slow-bursting homeostasis in the ADP/ATP ratio", recipe_fig13},
      {"fig14", "fast-bursting homeostasis in the Ca concentration", recipe_fig14},
  };
  return table;
}

int cmd_reproduce(const GlobalOpts& g, const std::string& id, bool full,
                  const std::vector<std::string>& argv) {
  for (const auto& rec : recipes()) {
    if (id != rec.id) continue;
    const fs::path dir = fs::path(g.out_dir) / rec.id;
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    rec.run(dir, g, full, outputs);

    RunManifest m;
    m.command = "reproduce";
    m.argv = argv;
    m.version = k_version;
    m.seed = g.seed ? *g.seed : k_recipe_seed;
    m.resolved["figure"] = rec.id;
    m.resolved["description"] = rec.what;
    m.outputs = outputs;
    finish_run(dir, std::move(m));
    return 0;
  }
  std::string known;
  for (const auto& rec : recipes()) known += std::string(" ") + rec.id;
  throw ConfigError("unknown figure id '" + id + "' (known:" + known + ")");
}

// re-run the manifest found in `dir` into a scratch directory and compare
// every listed output byte for byte
int cmd_check(const std::string& dir, const std::string& self) {
  const fs::path base(dir);
  const RunManifest m = read_manifest((base / "manifest.json").string());

  const fs::path tmp = base / ".check";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  std::string cmdline = "'" + self + "'";
  bool replaced = false;
  for (std::size_t i = 1; i < m.argv.size(); ++i) {
    std::string arg = m.argv[i];
    if (replaced) {
      replaced = false;
      arg = tmp.string();
    } else if (arg == "--out") {
      replaced = true;
    } else if (arg.rfind("--out=", 0) == 0) {
      arg = "--out=" + tmp.string();
    }
    cmdline += " '" + arg + "'";
  }
  if (m.argv.size() < 2 || cmdline.find("--out") == std::string::npos)
    cmdline += " --out '" + tmp.string() + "'";
  cmdline += " > /dev/null";

  if (std::system(cmdline.c_str()) != 0)
    throw NumericsError("check: re-run failed: " + cmdline);

  // reproduce nests its outputs under <out>/<figure>
  fs::path fresh = tmp;
  if (m.command == "reproduce") fresh /= m.resolved.at("figure");

  std::size_t bad = 0;
  for (const auto& f : m.outputs) {
    std::ifstream a(base / f, std::ios::binary), b(fresh / f, std::ios::binary);
    std::ostringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    const bool ok = a && b && sa.str() == sb.str();
    std::cout << (ok ? "ok      " : "differs ") << f << "\n";
    if (!ok) ++bad;
  }
  fs::remove_all(tmp);
  if (bad) throw NumericsError("check: " + std::to_string(bad) + " output(s) differ");
  std::cout << "check passed: " << m.outputs.size() << " output(s) identical\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oscillator homeostasis toolkit: simulate, sweep, bifurcate, reproduce"};
  app.set_version_flag("--version", k_version);
  app.require_subcommand(0, 1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "key=value config file")->check(CLI::ExistingFile);
  std::uint64_t seed_val = 0;
  auto* seed_opt = app.add_option("--seed", seed_val, "noise seed override");
  double dt_val = 0, t_end_val = 0, discard_val = 0;
  auto* dt_opt = app.add_option("--dt", dt_val, "integration step");
  auto* t_end_opt = app.add_option("--t-end", t_end_val, "integration span");
  auto* discard_opt = app.add_option("--discard", discard_val, "transient to drop");
  app.add_option("--workers", g.workers, "sweep worker threads (0 = all cores)");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "integrate one trajectory to CSV");
  c_sim->add_option("model", sim.model, "fhn | chay-keizer | pbm");
  c_sim->add_option("--set", sim.sets, "parameter override key=value")->take_all();
  c_sim->add_option("--noise", sim.noise_spec, "noise spec dist:key=val,...");
  c_sim->add_option("--method", sim.method, "rk4 | euler")->capture_default_str();
  c_sim->add_option("--x0", sim.x0_csv, "initial state, comma separated");
  c_sim->add_option("--record-stride", sim.record_stride, "record every Nth step");

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "chair-curve parameter sweep to CSV");
  c_sweep->add_option("model", sw.model, "fhn | chay-keizer | pbm");
  c_sweep->add_option("input", sw.input, "swept parameter name");
  c_sweep->add_option("range", sw.range, "lo:hi:step");
  c_sweep->add_option("--observe", sw.observe, "comma-separated state variables");
  c_sweep->add_option("--set", sw.sets, "parameter override key=value")->take_all();
  c_sweep->add_option("--noise", sw.noise_spec, "noise spec dist:key=val,...");
  c_sweep->add_option("--method", sw.method, "rk4 | euler")->capture_default_str();
  double window_val = 0, duty_val = 0, delta_val = 0;
  auto* window_opt = c_sweep->add_option("--window", window_val, "averaging window");
  auto* duty_opt =
      c_sweep->add_option("--duty-threshold", duty_val, "duty-cycle threshold on the fast variable");
  c_sweep->add_flag("--warm-start", sw.warm_start, "chain initial conditions (serial)");
  c_sweep->add_option("--seat-slope", sw.seat_slope_range,
                      "append least-squares slope over lo:hi");
  auto* delta_opt = c_sweep->add_option(
      "--interval", delta_val, "append oscillation interval at this departure threshold");

  BifurcateArgs bf;
  auto* c_bif = app.add_subcommand("bifurcate", "bifurcation structure to CSV");
  c_bif->add_option("model", bf.model, "fhn | chay-keizer");
  c_bif->add_option("--set", bf.sets, "parameter override key=value")->take_all();
  c_bif->add_option("--alpha", bf.alpha_range, "feedback-strength range lo:hi:step")
      ->capture_default_str();
  double dv_val = 0, cmax_val = 0;
  auto* dv_opt = c_bif->add_option("--dv", dv_val, "branch grid spacing in V");
  auto* cmax_opt = c_bif->add_option("--c-max", cmax_val, "branch upper limit in c");

  std::string fig_id, check_dir;
  bool full = false;
  auto* c_rep = app.add_subcommand("reproduce", "rerun a canned figure recipe");
  c_rep->add_option("figure", fig_id, "fig2 ... fig14");
  c_rep->add_flag("--full", full, "include the expensive panel variants");
  c_rep->add_option("--check", check_dir, "re-run the manifest in DIR and diff outputs")
      ->check(CLI::ExistingDirectory);

  for (auto* sub : {c_sim, c_sweep, c_bif, c_rep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*seed_opt) g.seed = seed_val;
  if (*dt_opt) g.dt = dt_val;
  if (*t_end_opt) g.t_end = t_end_val;
  if (*discard_opt) g.discard = discard_val;
  if (*window_opt) sw.window = window_val;
  if (*duty_opt) sw.duty_threshold = duty_val;
  if (*delta_opt) sw.interval_delta = delta_val;
  if (*dv_opt) bf.dv = dv_val;
  if (*cmax_opt) bf.c_max = cmax_val;

  const std::vector<std::string> argvec(argv, argv + argc);
  try {
    if (app.got_subcommand(c_sim)) return cmd_simulate(g, sim, argvec);
    if (app.got_subcommand(c_sweep)) return cmd_sweep(g, sw, argvec);
    if (app.got_subcommand(c_bif)) return cmd_bifurcate(g, bf, argvec);
    if (app.got_subcommand(c_rep)) {
      if (!check_dir.empty()) return cmd_check(check_dir, argvec[0]);
      if (fig_id.empty()) throw ConfigError("reproduce: give a figure id or --check DIR");
      return cmd_reproduce(g, fig_id, full, argvec);
    }
    std::cout << app.help();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericsError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
