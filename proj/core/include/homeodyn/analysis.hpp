#pragma once
// time-averaged observables, state classification, chair curves
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homeodyn/integrator.hpp"
#include "homeodyn/models.hpp"
#include "homeodyn/noise.hpp"
#include "homeodyn/trajectory.hpp"

namespace homeodyn {

// trapezoidal mean of one variable over [t0 + transient_discard, t_end]
double time_average(const Trajectory& traj, const std::string& variable,
                    double transient_discard = 0.0);

// fraction of window time spent above threshold, crossing-interpolated
double duty_cycle(const Trajectory& traj, const std::string& variable,
                  double threshold, double transient_discard = 0.0);

struct PeriodEstimate {
    double mean = 0.0;
    double sd = 0.0;
    int cycles = 0;
};

// mean +/- sd spacing of upward mid-range crossings; nullopt below 3 crossings
std::optional<PeriodEstimate> period_estimate(const Trajectory& traj,
                                              const std::string& variable,
                                              double transient_discard = 0.0);

enum class DynState { quiescent, oscillatory, bursting, spiking, undetermined };

const char* to_string(DynState s);

struct ClassifyConfig {
    std::string slow_variable;                    // amplitude test target
    double eps_amp = 0.0;                         // quiescence amplitude bound
    std::optional<std::string> voltage_variable;  // enables spike detection
    double spike_threshold = -40.0;               // mV, upward crossing = spike
    double v_silent = -55.0;                      // mV, silent-phase level
    double t_silent = 500.0;                      // ms, minimal silent epoch
};

// reference oscillatory ranges are measured at a fixed operating point of
// each model; eps_amp is 1% of each
ClassifyConfig default_classify_config(const ModelSystem& sys);

DynState classify_state(const Trajectory& traj, const ClassifyConfig& cfg,
                        double transient_discard = 0.0);

// model-specific sweep defaults (time units of the model)
double default_transient_discard(const ModelSystem& sys);
double default_averaging_window(const ModelSystem& sys);

struct SweepPoint {
    double input = 0.0;
    // mean of the realized parameter when noise replaces the swept input
    // (folded sampling shifts it); equals input otherwise
    double input_effective = 0.0;
    std::vector<double> averages;  // one per state variable, cycle-snapped
    DynState state = DynState::undetermined;
    double period = 0.0;     // 0 when no period resolved
    double period_sd = 0.0;
    double duty = 0.0;       // filled when duty_threshold given
    std::optional<uint64_t> seed;
    std::string error;       // nonempty when the point failed numerically
};

struct ChairCurve {
    std::string model;
    std::string input_name;
    std::vector<std::string> labels;  // state variable names, averages order
    std::vector<SweepPoint> points;

    std::size_t label_index(const std::string& name) const;
};

struct SweepConfig {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    Method method = Method::rk4;
    double dt = 0.0;                      // 0 -> model default
    double transient_discard = -1.0;      // <0 -> model default
    double averaging_window = -1.0;       // <0 -> model default
    std::optional<NoiseProcess> noise;    // per-point seed = seed ^ index
    std::optional<double> duty_threshold;
    bool warm_start = false;
    int workers = 1;                      // 0 -> hardware concurrency; >1 disables warm_start

    void validate() const;
};

// inclusive grid lo, lo+step, ... within half a step of hi
std::vector<double> sweep_grid(double lo, double hi, double step);

double default_dt(const ModelSystem& sys, Method method);

ChairCurve chair_sweep(const ModelSystem& sys, const std::string& input_name,
                       const SweepConfig& cfg);

// least-squares slope of one observable over inputs in [lo, hi]
double seat_slope(const ChairCurve& curve, const std::string& observable,
                  double lo, double hi);

struct OscillationInterval {
    double left = 0.0;
    double right = 0.0;
    double length = 0.0;
    bool found = false;
};

// scanning inward from both grid ends, an endpoint is the first input where
// the deterministic curve leaves its outer (non-oscillating) branch or the
// stochastic average departs from it by more than delta
OscillationInterval oscillation_interval_length(const ChairCurve& stoch,
                                                const ChairCurve& det,
                                                const std::string& observable,
                                                double delta = 0.03);

}  // namespace homeodyn
