#include "homeodyn/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <type_traits>
#include <variant>

#include "homeodyn/distributions.hpp"
#include "homeodyn/errors.hpp"

namespace homeodyn {

namespace {

constexpr double k_nan = std::numeric_limits<double>::quiet_NaN();

// first sample index with time >= t_from (small slack for representation error)
std::size_t first_index_at(const Trajectory& traj, double t_from) {
    if (traj.size() == 0) throw ConfigError("analysis: empty trajectory");
    if (t_from <= traj.t0) return 0;
    const double k = (t_from - traj.t0) / traj.dt;
    const auto i = static_cast<std::size_t>(std::ceil(k - 1e-9));
    if (i + 1 >= traj.size())
        throw ConfigError("analysis: transient discard leaves no averaging window");
    return i;
}

// indices i with v[i-1] < level <= v[i]
std::vector<std::size_t> upward_crossings(const std::vector<double>& v,
                                          std::size_t i0, double level) {
    std::vector<std::size_t> out;
    for (std::size_t i = i0 + 1; i < v.size(); ++i)
        if (v[i - 1] < level && v[i] >= level) out.push_back(i);
    return out;
}

std::pair<double, double> window_minmax(const std::vector<double>& v, std::size_t i0) {
    double lo = v[i0], hi = v[i0];
    for (std::size_t i = i0; i < v.size(); ++i) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
    }
    return {lo, hi};
}

// mean over samples [a, b], uniform spacing
double trapezoid_mean(const std::vector<double>& v, std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += v[i] + v[i + 1];
    return s / (2.0 * static_cast<double>(b - a));
}

}  // namespace

double time_average(const Trajectory& traj, const std::string& variable,
                    double transient_discard) {
    const auto& v = traj.col(variable);
    const std::size_t i0 = first_index_at(traj, traj.t0 + transient_discard);
    return trapezoid_mean(v, i0, traj.size() - 1);
}

double duty_cycle(const Trajectory& traj, const std::string& variable,
                  double threshold, double transient_discard) {
    const auto& v = traj.col(variable);
    const std::size_t i0 = first_index_at(traj, traj.t0 + transient_discard);
    const auto [lo, hi] = window_minmax(v, i0);
    if (!(threshold > lo && threshold < hi))
        throw ConfigError("duty_cycle: threshold outside the variable's range");
    double above = 0.0;  // in units of one sampling interval
    for (std::size_t i = i0; i + 1 < v.size(); ++i) {
        const double a = v[i], b = v[i + 1];
        const bool ia = a > threshold, ib = b > threshold;
        if (ia && ib) {
            above += 1.0;
        } else if (ia != ib) {
            const double s = (threshold - a) / (b - a);
            above += ia ? s : 1.0 - s;
        }
    }
    return above / static_cast<double>(v.size() - 1 - i0);
}

std::optional<PeriodEstimate> period_estimate(const Trajectory& traj,
                                              const std::string& variable,
                                              double transient_discard) {
    const auto& v = traj.col(variable);
    const std::size_t i0 = first_index_at(traj, traj.t0 + transient_discard);
    const auto [lo, hi] = window_minmax(v, i0);
    const double mid = 0.5 * (lo + hi);
    const auto ups = upward_crossings(v, i0, mid);
    if (ups.size() < 3) return std::nullopt;

    std::vector<double> times;
    times.reserve(ups.size());
    for (std::size_t i : ups) {
        const double frac = (mid - v[i - 1]) / (v[i] - v[i - 1]);
        times.push_back(traj.time_at(i - 1) + frac * traj.dt);
    }
    PeriodEstimate pe;
    pe.cycles = static_cast<int>(times.size()) - 1;
    double sum = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) sum += times[i] - times[i - 1];
    pe.mean = sum / pe.cycles;
    double ss = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double d = times[i] - times[i - 1] - pe.mean;
        ss += d * d;
    }
    pe.sd = pe.cycles > 1 ? std::sqrt(ss / (pe.cycles - 1)) : 0.0;
    return pe;
}

const char* to_string(DynState s) {
    switch (s) {
        case DynState::quiescent: return "quiescent";
        case DynState::oscillatory: return "oscillatory";
        case DynState::bursting: return "bursting";
        case DynState::spiking: return "spiking";
        case DynState::undetermined: return "undetermined";
    }
    return "undetermined";
}

ClassifyConfig default_classify_config(const ModelSystem& sys) {
    ClassifyConfig c;
    c.slow_variable = sys.slow_label();
    switch (sys.kind()) {
        case ModelKind::fhn:
            c.eps_amp = 0.014;  // 1% of the y oscillation range at alpha=2, J=0
            break;
        case ModelKind::chay_keizer:
            c.eps_amp = 5e-4;  // 1% of the bursting c range at table parameters
            c.voltage_variable = "V";
            c.t_silent = 500.0;
            break;
        case ModelKind::pbm:
            c.eps_amp = 1e-3;  // 1% of the slow-bursting c range at gKCa=25
            c.voltage_variable = "V";
            c.t_silent = 5000.0;
            break;
    }
    return c;
}

DynState classify_state(const Trajectory& traj, const ClassifyConfig& cfg,
                        double transient_discard) {
    const std::size_t i0 = first_index_at(traj, traj.t0 + transient_discard);
    const auto& slow = traj.col(cfg.slow_variable);

    // spikes take precedence: a continuously spiking trajectory can have a
    // slow-variable ripple smaller than the quiescence bound
    if (cfg.voltage_variable) {
        const auto& v = traj.col(*cfg.voltage_variable);
        const auto spikes = upward_crossings(v, i0, cfg.spike_threshold);
        if (spikes.size() >= 2) {
            double longest = 0.0, run = 0.0;
            for (std::size_t i = i0; i < v.size(); ++i) {
                if (v[i] < cfg.v_silent) {
                    run += traj.dt;
                    longest = std::max(longest, run);
                } else {
                    run = 0.0;
                }
            }
            return longest >= cfg.t_silent ? DynState::bursting : DynState::spiking;
        }
    }

    const auto [lo, hi] = window_minmax(slow, i0);
    if (hi - lo < cfg.eps_amp) return DynState::quiescent;
    const auto ups = upward_crossings(slow, i0, 0.5 * (lo + hi));
    return ups.size() >= 2 ? DynState::oscillatory : DynState::undetermined;
}

double default_transient_discard(const ModelSystem& sys) {
    switch (sys.kind()) {
        case ModelKind::fhn: return 200.0;
        case ModelKind::chay_keizer: {
            // the quiescent branch relaxes at rate ~ f*kc; the fixed floor is
            // not enough below kc ~ 0.05
            const double f = sys.get_param("f");
            const double kc = sys.get_param("kc");
            if (f > 0.0 && kc > 0.0)
                return std::min(2e6, std::max(1e5, 7.0 / (f * kc)));
            return 2e6;
        }
        case ModelKind::pbm: return 1.8e6;
    }
    return 0.0;
}

double default_averaging_window(const ModelSystem& sys) {
    switch (sys.kind()) {
        case ModelKind::fhn: return 1500.0;           // ~50 periods
        case ModelKind::chay_keizer: return 1.7e5;    // ~20 burst cycles
        case ModelKind::pbm: return 1.8e6;            // ~10 slow burst cycles
    }
    return 0.0;
}

double default_dt(const ModelSystem& sys, Method method) {
    if (sys.kind() == ModelKind::fhn) return 1e-4;
    return method == Method::rk4 ? 0.05 : 0.01;
}

void SweepConfig::validate() const {
    if (!(lo < hi)) throw ConfigError("sweep: lo must be less than hi");
    if (!(step > 0.0)) throw ConfigError("sweep: step must be positive");
    if (dt < 0.0) throw ConfigError("sweep: dt must be positive");
    if (workers < 0) throw ConfigError("sweep: workers must be non-negative");
    if (noise) noise->validate();
}

std::vector<double> sweep_grid(double lo, double hi, double step) {
    if (!(step > 0.0)) throw ConfigError("sweep_grid: step must be positive");
    if (!(lo < hi)) throw ConfigError("sweep_grid: lo must be less than hi");
    std::vector<double> g;
    for (std::int64_t i = 0;; ++i) {
        const double v = lo + static_cast<double>(i) * step;
        if (v > hi + 0.5 * step) break;
        g.push_back(v);
    }
    return g;
}

std::size_t ChairCurve::label_index(const std::string& name) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == name) return i;
    throw ConfigError("chair curve: unknown observable '" + name + "'");
}

namespace {

struct WindowStats {
    std::vector<double> averages;
    DynState state = DynState::undetermined;
    double period = 0.0, period_sd = 0.0, duty = 0.0;
};

// averages are cycle-snapped: taken between the first and last upward
// mid-range crossing of the slow variable, so partial periods do not bias
// the sawtooth means
WindowStats analyze_window(const Trajectory& w, const std::string& slow,
                           const std::string& fast, const ClassifyConfig& ccfg,
                           const std::optional<double>& duty_threshold) {
    WindowStats out;
    const auto& sv = w.col(slow);
    const auto [lo, hi] = window_minmax(sv, 0);
    const auto ups = upward_crossings(sv, 0, 0.5 * (lo + hi));
    std::size_t a = 0, b = w.size() - 1;
    if (ups.size() >= 2) {
        a = ups.front();
        b = ups.back();
    }
    out.averages.reserve(w.dim());
    for (const auto& col : w.cols) out.averages.push_back(trapezoid_mean(col, a, b));
    out.state = classify_state(w, ccfg);
    if (auto pe = period_estimate(w, slow)) {
        out.period = pe->mean;
        out.period_sd = pe->sd;
    }
    if (duty_threshold) {
        const auto [flo, fhi] = window_minmax(w.col(fast), 0);
        if (*duty_threshold >= fhi)
            out.duty = 0.0;
        else if (*duty_threshold <= flo)
            out.duty = 1.0;
        else
            out.duty = duty_cycle(w, fast, *duty_threshold);
    }
    return out;
}

}  // namespace

namespace {

// one grid point of a sweep; `warm` chains final states in serial mode
SweepPoint run_sweep_point(const ModelSystem& sys0, const std::string& input_name,
                           const SweepConfig& cfg, const std::vector<std::string>& labels,
                           const std::string& slow, const std::string& fast,
                           std::size_t i, double input, std::vector<double>* warm) {
    SweepPoint pt;
    pt.input = input;
    pt.input_effective = input;
    if (cfg.noise && cfg.noise->target == input_name && !cfg.noise->mean &&
        cfg.noise->dist == NoiseDist::folded_normal)
        pt.input_effective = folded_normal_moments(input, cfg.noise->sigma).mean;
    try {
        ModelSystem ms = sys0;
        ms.set_param(input_name, input);
        ms.validate();
        const ClassifyConfig ccfg = default_classify_config(ms);
        const double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(ms, cfg.method);
        const double discard = cfg.transient_discard >= 0.0
                                   ? cfg.transient_discard
                                   : default_transient_discard(ms);
        const double window = cfg.averaging_window > 0.0
                                  ? cfg.averaging_window
                                  : default_averaging_window(ms);
        std::visit(
            [&](auto model) {
                using System = std::decay_t<decltype(model)>;
                typename System::State x0;
                if (warm && cfg.warm_start && warm->size() == x0.size()) {
                    for (std::size_t j = 0; j < x0.size(); ++j) x0[j] = (*warm)[j];
                } else if constexpr (std::is_same_v<System, Fhn>) {
                    // cold start just off the equilibrium: warm starts would
                    // track a coexisting large cycle past the subcritical Hopf
                    // and shift the detected onset
                    x0 = fhn_equilibrium(model.p);
                    x0[0] += 0.01;
                } else {
                    x0 = model.default_x0();
                }

                Simulation<System> sim(model, cfg.method, dt, x0);
                if (cfg.noise) {
                    const std::uint64_t seed_i =
                        cfg.noise->seed ^ static_cast<std::uint64_t>(i);
                    sim.attach_noise(*cfg.noise, seed_i);
                    pt.seed = seed_i;
                }
                sim.advance(discard);

                const std::int64_t n_window = step_count(window, dt);
                const std::int64_t stride =
                    std::max<std::int64_t>(1, (n_window + 999999) / 1000000);
                Trajectory w;
                w.t0 = sim.time();
                w.dt = dt * static_cast<double>(stride);
                w.labels = labels;
                w.cols.resize(labels.size());
                const auto n_samples = static_cast<std::size_t>(n_window / stride + 1);
                for (auto& col : w.cols) col.reserve(n_samples);
                const auto& s0 = sim.state();
                for (std::size_t j = 0; j < s0.size(); ++j) w.cols[j].push_back(s0[j]);
                sim.advance(window, stride,
                            [&](double, const typename System::State& s) {
                                for (std::size_t j = 0; j < s.size(); ++j)
                                    w.cols[j].push_back(s[j]);
                            });

                const auto st = analyze_window(w, slow, fast, ccfg, cfg.duty_threshold);
                pt.averages = st.averages;
                pt.state = st.state;
                pt.period = st.period;
                pt.period_sd = st.period_sd;
                pt.duty = st.duty;
                if (warm) warm->assign(sim.state().begin(), sim.state().end());
            },
            ms.model);
    } catch (const std::exception& e) {
        pt.error = e.what();
        pt.averages.assign(labels.size(), k_nan);
        pt.state = DynState::undetermined;
        if (warm) warm->clear();
    }
    return pt;
}

}  // namespace

ChairCurve chair_sweep(const ModelSystem& sys0, const std::string& input_name,
                       const SweepConfig& cfg) {
    cfg.validate();
    {
        ModelSystem probe = sys0;
        probe.validate();
        (void)probe.get_param(input_name);  // throws on unknown input
    }

    ChairCurve curve;
    curve.model = std::string(sys0.name());
    curve.input_name = input_name;
    curve.labels = sys0.labels();

    const auto grid = sweep_grid(cfg.lo, cfg.hi, cfg.step);
    const std::string slow = sys0.slow_label();
    const std::string fast = sys0.fast_label();

    std::size_t n_workers = cfg.workers == 0
                                ? std::max(1u, std::thread::hardware_concurrency())
                                : static_cast<std::size_t>(cfg.workers);
    // warm starts chain point to point and are inherently serial
    if (cfg.warm_start) n_workers = 1;
    n_workers = std::min(n_workers, grid.size());

    curve.points.resize(grid.size());
    if (n_workers <= 1) {
        std::vector<double> warm;
        for (std::size_t i = 0; i < grid.size(); ++i)
            curve.points[i] = run_sweep_point(sys0, input_name, cfg, curve.labels, slow,
                                              fast, i, grid[i], &warm);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= grid.size()) return;
                curve.points[i] = run_sweep_point(sys0, input_name, cfg, curve.labels,
                                                  slow, fast, i, grid[i], nullptr);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return curve;
}

double seat_slope(const ChairCurve& curve, const std::string& observable,
                  double lo, double hi) {
    const std::size_t vi = curve.label_index(observable);
    std::vector<double> xs, ys;
    for (const auto& pt : curve.points) {
        if (!pt.error.empty()) continue;
        if (pt.input < lo - 1e-12 || pt.input > hi + 1e-12) continue;
        xs.push_back(pt.input);
        ys.push_back(pt.averages[vi]);
    }
    if (xs.size() < 2) throw ConfigError("seat_slope: fewer than 2 points in interval");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw ConfigError("seat_slope: degenerate input interval");
    return sxy / sxx;
}

OscillationInterval oscillation_interval_length(const ChairCurve& stoch,
                                                const ChairCurve& det,
                                                const std::string& observable,
                                                double delta) {
    if (!(delta > 0.0))
        throw ConfigError("oscillation_interval_length: delta must be positive");
    if (stoch.points.size() != det.points.size())
        throw ConfigError("oscillation_interval_length: curves have different grids");
    const std::size_t vs = stoch.label_index(observable);
    const std::size_t vd = det.label_index(observable);

    // departure = the deterministic curve leaves its outer branch (oscillation
    // band), or the stochastic average moves off that branch by more than delta
    auto departs = [&](std::size_t i) {
        const auto& d = det.points[i];
        const auto& s = stoch.points[i];
        if (std::abs(d.input - s.input) > 1e-9)
            throw ConfigError("oscillation_interval_length: curves have different grids");
        if (!d.error.empty() || !s.error.empty()) return true;
        if (d.state == DynState::oscillatory || d.state == DynState::bursting) return true;
        return std::abs(s.averages[vs] - d.averages[vd]) > delta;
    };

    OscillationInterval out;
    const std::size_t n = det.points.size();
    std::size_t li = n;
    for (std::size_t i = 0; i < n; ++i)
        if (departs(i)) {
            li = i;
            break;
        }
    if (li == n) return out;
    std::size_t ri = li;
    for (std::size_t i = n; i-- > li;)
        if (departs(i)) {
            ri = i;
            break;
        }
    out.left = stoch.points[li].input;
    out.right = stoch.points[ri].input;
    out.length = out.right - out.left;
    out.found = true;
    return out;
}

}  // namespace homeodyn
