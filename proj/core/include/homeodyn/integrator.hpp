#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "homeodyn/errors.hpp"
#include "homeodyn/noise.hpp"
#include "homeodyn/trajectory.hpp"

namespace homeodyn {

enum class Method { forward_euler, rk4 };

Method parse_method(std::string_view name);
std::string_view to_string(Method m);

struct IntegratorConfig {
  Method method = Method::rk4;
  double dt = 0.0;
  double t_end = 0.0;
  std::int64_t record_stride = 1;

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("integrator: dt must be positive");
    if (!(t_end > 0.0)) throw ConfigError("integrator: t_end must be positive");
    if (record_stride < 1) throw ConfigError("integrator: record_stride must be >= 1");
  }
};

template <class System>
concept VectorField = requires(const System& s, const typename System::State& x,
                               typename System::State& dx) {
  s.rhs(x, dx);
  typename System::Params;
};

template <VectorField System>
inline void step_euler(const System& sys, typename System::State& x, double dt) {
  typename System::State k;
  sys.rhs(x, k);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt * k[i];
}

template <VectorField System>
inline void step_rk4(const System& sys, typename System::State& x, double dt) {
  using State = typename System::State;
  State k1, k2, k3, k4, tmp;
  sys.rhs(x, k1);
  for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
  sys.rhs(tmp, k2);
  for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
  sys.rhs(tmp, k3);
  for (std::size_t i = 0; i < x.size(); ++i) tmp[i] = x[i] + dt * k3[i];
  sys.rhs(tmp, k4);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

/// Number of whole steps covering [0, t_end]; tolerates representation error
/// in t_end/dt.
inline std::int64_t step_count(double t_end, double dt) {
  return static_cast<std::int64_t>(std::floor(t_end / dt + 1e-9));
}

/// A running integration.  Keeps the state, the global step counter and the
/// bound noise stream together so that a run can be advanced in phases
/// (transient, then averaging window) without breaking determinism: the
/// realized parameter path is identical to a single uninterrupted run.
template <VectorField System>
class Simulation {
 public:
  using State = typename System::State;

  Simulation(System sys, Method method, double dt, State x0)
      : sys_(std::move(sys)), method_(method), dt_(dt), x_(x0) {
    if (!(dt > 0.0)) throw ConfigError("integrator: dt must be positive");
  }

  /// Bind a piecewise-constant noise process to one of the system parameters.
  /// Must be called before the first advance.  seed_override lets sweeps give
  /// each point its own stream.
  void attach_noise(const NoiseProcess& proc, std::uint64_t seed_override) {
    proc.validate();
    if (step_ != 0) throw ConfigError("attach_noise: run already started");
    target_ = sys_.p.ptr(proc.target);
    if (!target_)
      throw ConfigError("noise: unknown target parameter '" + proc.target + "' for model " +
                        sys_.model_name);
    sampler_.emplace(proc, dt_, *target_, seed_override);
  }

  /// Advance by floor(duration/dt) steps, invoking obs(t, x) after every
  /// record_stride-th step (not on the current state).  Throws BlowupError
  /// on the first non-finite component.
  template <class Observer>
  void advance(double duration, std::int64_t record_stride, Observer&& obs) {
    const std::int64_t n = step_count(duration, dt_);
    const std::int64_t base = step_;
    for (std::int64_t s = 1; s <= n; ++s) {
      if (sampler_ && sampler_->refresh_due(base + s - 1)) *target_ = sampler_->draw();
      if (method_ == Method::rk4)
        step_rk4(sys_, x_, dt_);
      else
        step_euler(sys_, x_, dt_);
      double sum = 0.0;
      for (double v : x_) sum += v;
      if (!std::isfinite(sum)) {
        const double t_bad = static_cast<double>(base + s) * dt_;
        throw BlowupError(t_bad, "integration diverged (non-finite state) at t = " +
                                     std::to_string(t_bad));
      }
      if (s % record_stride == 0) obs(static_cast<double>(base + s) * dt_, x_);
    }
    step_ = base + n;
  }

  void advance(double duration) {
    advance(duration, std::numeric_limits<std::int64_t>::max(),
            [](double, const State&) {});
  }

  const State& state() const { return x_; }
  void set_state(const State& x) { x_ = x; }
  double time() const { return static_cast<double>(step_) * dt_; }
  double dt() const { return dt_; }
  const System& system() const { return sys_; }

 private:
  System sys_;
  Method method_;
  double dt_;
  State x_;
  std::int64_t step_ = 0;
  double* target_ = nullptr;
  std::optional<NoiseSampler> sampler_;
};

/// Fixed-step integration of `sys` from x0 over [0, t_end], recording every
/// record_stride-th step (plus the initial state).  The returned trajectory
/// has floor(t_end/dt)/record_stride + 1 samples at spacing dt*record_stride.
template <VectorField System>
Trajectory integrate(const System& sys, const typename System::State& x0,
                     const IntegratorConfig& cfg,
                     const std::optional<NoiseProcess>& noise = std::nullopt) {
  cfg.validate();
  sys.p.validate();

  Trajectory traj;
  traj.t0 = 0.0;
  traj.dt = cfg.dt * static_cast<double>(cfg.record_stride);
  traj.labels.assign(System::state_labels.begin(), System::state_labels.end());
  traj.cols.resize(x0.size());
  const std::int64_t n_samples =
      step_count(cfg.t_end, cfg.dt) / cfg.record_stride + 1;
  for (auto& c : traj.cols) c.reserve(static_cast<std::size_t>(n_samples));
  for (std::size_t i = 0; i < x0.size(); ++i) traj.cols[i].push_back(x0[i]);

  Simulation<System> sim(sys, cfg.method, cfg.dt, x0);
  if (noise) sim.attach_noise(*noise, noise->seed);
  sim.advance(cfg.t_end, cfg.record_stride,
              [&](double, const typename System::State& x) {
                for (std::size_t i = 0; i < x.size(); ++i) traj.cols[i].push_back(x[i]);
              });
  return traj;
}

}  // namespace homeodyn
