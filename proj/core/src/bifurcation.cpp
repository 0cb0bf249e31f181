#include "homeodyn/bifurcation.hpp"

#include <algorithm>
#include <cmath>

#include "homeodyn/errors.hpp"
#include "homeodyn/integrator.hpp"

namespace homeodyn {

FhnHopfPoints fhn_hopf_points(const FhnParams& p) {
    p.validate();
    if (!(p.mu > 1.0)) throw ConfigError("hopf: mu must exceed 1");
    const double q = 1.0 - 1.0 / (p.mu * p.mu);
    if (!(p.alpha > 1.0 - q))  // keeps the determinant q + alpha - 1 positive
        throw ConfigError("hopf: alpha too small, no Hopf pair");
    const double rq = std::sqrt(q);
    FhnHopfPoints h;
    h.j_plus = (p.alpha - 1.0) * rq + q * rq / 3.0;
    h.j_minus = -h.j_plus;
    h.x_at_j_minus = rq;
    h.x_at_j_plus = -rq;
    return h;
}

std::vector<FhnHopfLocusPoint> fhn_hopf_locus(const FhnParams& base, double alpha_lo,
                                              double alpha_hi, double step) {
    if (!(step > 0.0)) throw ConfigError("hopf locus: step must be positive");
    if (!(alpha_lo < alpha_hi)) throw ConfigError("hopf locus: empty alpha range");
    std::vector<FhnHopfLocusPoint> locus;
    for (std::int64_t i = 0;; ++i) {
        const double a = alpha_lo + static_cast<double>(i) * step;
        if (a > alpha_hi + 0.5 * step) break;
        FhnParams p = base;
        p.alpha = a;
        const auto h = fhn_hopf_points(p);
        locus.push_back({a, h.j_minus, h.j_plus});
    }
    return locus;
}

const char* to_string(EqStability s) {
    switch (s) {
        case EqStability::stable: return "stable";
        case EqStability::unstable: return "unstable";
        case EqStability::saddle: return "saddle";
    }
    return "unstable";
}

void ck_fast_trace_det(const CkParams& p, double c, double V, double w,
                       double& trace, double& det) {
    const CkFast sys{p, c};
    const double hV = 1e-6 * std::max(1.0, std::abs(V));
    const double hw = 1e-6 * std::max(1.0, std::abs(w));
    CkFast::State dp, dm;
    sys.rhs({V + hV, w}, dp);
    sys.rhs({V - hV, w}, dm);
    const double a11 = (dp[0] - dm[0]) / (2.0 * hV);
    const double a21 = (dp[1] - dm[1]) / (2.0 * hV);
    sys.rhs({V, w + hw}, dp);
    sys.rhs({V, w - hw}, dm);
    const double a12 = (dp[0] - dm[0]) / (2.0 * hw);
    const double a22 = (dp[1] - dm[1]) / (2.0 * hw);
    trace = a11 + a22;
    det = a11 * a22 - a12 * a21;
}

std::optional<double> ck_branch_c_of_v(const CkParams& p, double V) {
    const double dvk = V - p.VK;
    if (dvk <= 0.0) return std::nullopt;
    const double w = boltzmann(V, p.vw, p.sw);
    const double ICa = p.gCa * boltzmann(V, p.vm, p.sm) * (V - p.VCa);
    const double IK = p.gK * w * dvk;
    const double IKATP = p.gKATP * dvk;
    // balance: gKCa * h(c) * (V - VK) = -(ICa + IK + IKATP - Iap)
    const double h = -(ICa + IK + IKATP - p.Iap) / (p.gKCa * dvk);
    if (h <= 0.0 || h >= 1.0) return std::nullopt;
    return p.KOmega * std::pow(h / (1.0 - h), 1.0 / p.p);
}

void FastDiagramConfig::validate() const {
    if (!(v_lo < v_hi)) throw ConfigError("fast diagram: empty V range");
    if (!(dv > 0.0)) throw ConfigError("fast diagram: dv must be positive");
    if (!(c_max > 0.0)) throw ConfigError("fast diagram: c_max must be positive");
    if (!(envelope_dc > 0.0)) throw ConfigError("fast diagram: envelope_dc must be positive");
    if (envelope_discard < 0.0) throw ConfigError("fast diagram: negative envelope discard");
    if (!(envelope_window > 0.0)) throw ConfigError("fast diagram: envelope window must be positive");
    if (!(envelope_dt > 0.0)) throw ConfigError("fast diagram: envelope dt must be positive");
    if (!(homoclinic_tol > 0.0)) throw ConfigError("fast diagram: homoclinic_tol must be positive");
}

namespace {

struct EnvMeasure {
    bool alive = false;
    double v_min = 0.0, v_max = 0.0, period = 0.0;
    CkFast::State final{};
};

// frozen-c run: discard the transient, then test for a sustained V oscillation
EnvMeasure measure_envelope_point(const CkParams& p, double c, const CkFast::State& x0,
                                  const FastDiagramConfig& cfg) {
    EnvMeasure out;
    const CkFast sys{p, c};
    Simulation<CkFast> sim(sys, Method::rk4, cfg.envelope_dt, x0);
    std::vector<double> vs;
    try {
        sim.advance(cfg.envelope_discard);
        vs.reserve(static_cast<std::size_t>(cfg.envelope_window / cfg.envelope_dt) + 1);
        vs.push_back(sim.state()[0]);
        sim.advance(cfg.envelope_window, 1,
                    [&](double, const CkFast::State& s) { vs.push_back(s[0]); });
    } catch (const BlowupError&) {
        return out;
    }
    out.final = sim.state();
    double lo = vs[0], hi = vs[0];
    for (double v : vs) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out.v_min = lo;
    out.v_max = hi;
    if (hi - lo < 0.5) return out;  // amplitude collapsed
    const double mid = 0.5 * (lo + hi);
    std::vector<double> times;
    for (std::size_t i = 1; i < vs.size(); ++i)
        if (vs[i - 1] < mid && vs[i] >= mid) {
            const double frac = (mid - vs[i - 1]) / (vs[i] - vs[i - 1]);
            times.push_back((static_cast<double>(i - 1) + frac) * cfg.envelope_dt);
        }
    if (times.size() < 3) return out;
    out.alive = true;
    out.period = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    return out;
}

}  // namespace

FastDiagram ck_fast_diagram(const CkParams& p, const FastDiagramConfig& cfg) {
    p.validate();
    cfg.validate();
    FastDiagram out;

    // equilibrium branch, single-valued as c(V)
    const auto nv =
        static_cast<std::int64_t>(std::floor((cfg.v_hi - cfg.v_lo) / cfg.dv + 0.5)) + 1;
    for (std::int64_t i = 0; i < nv; ++i) {
        const double V = cfg.v_lo + static_cast<double>(i) * cfg.dv;
        const auto c = ck_branch_c_of_v(p, V);
        if (!c || *c > cfg.c_max) continue;
        BranchPoint bp;
        bp.V = V;
        bp.c = *c;
        bp.w = boltzmann(V, p.vw, p.sw);
        ck_fast_trace_det(p, bp.c, bp.V, bp.w, bp.trace, bp.det);
        bp.stability = bp.det < 0.0
                           ? EqStability::saddle
                           : (bp.trace < 0.0 ? EqStability::stable : EqStability::unstable);
        out.branch.push_back(bp);
    }

    auto adjacent = [&](const BranchPoint& a, const BranchPoint& b) {
        return std::abs((b.V - a.V) - cfg.dv) < 0.5 * cfg.dv;
    };

    // folds: interior extrema of c along the branch, parabola-refined
    for (std::size_t i = 1; i + 1 < out.branch.size(); ++i) {
        const auto& a = out.branch[i - 1];
        const auto& b = out.branch[i];
        const auto& d = out.branch[i + 1];
        if (!adjacent(a, b) || !adjacent(b, d)) continue;
        const bool is_max = b.c >= a.c && b.c >= d.c && (b.c > a.c || b.c > d.c);
        const bool is_min = b.c <= a.c && b.c <= d.c && (b.c < a.c || b.c < d.c);
        if (!is_max && !is_min) continue;
        FoldPoint fp{b.c, b.V};
        const double denom = a.c - 2.0 * b.c + d.c;
        if (denom != 0.0) {
            const double s = 0.5 * (a.c - d.c) / denom;  // vertex offset in dv units
            fp.V = b.V + s * cfg.dv;
            fp.c = b.c + 0.5 * (d.c - a.c) * s + 0.5 * denom * s * s;
        }
        out.folds.push_back(fp);
    }
    std::sort(out.folds.begin(), out.folds.end(),
              [](const FoldPoint& a, const FoldPoint& b) { return a.c < b.c; });

    // Hopf points: trace sign change with positive determinant, bisected on V
    for (std::size_t i = 0; i + 1 < out.branch.size(); ++i) {
        const auto& a = out.branch[i];
        const auto& b = out.branch[i + 1];
        if (!adjacent(a, b)) continue;
        if (!(a.det > 0.0 && b.det > 0.0)) continue;
        if ((a.trace < 0.0) == (b.trace < 0.0)) continue;
        double vlo = a.V, vhi = b.V, tlo = a.trace;
        double vh = 0.5 * (vlo + vhi);
        for (int it = 0; it < 200; ++it) {
            vh = 0.5 * (vlo + vhi);
            const auto cm = ck_branch_c_of_v(p, vh);
            if (!cm) break;
            double tr, de;
            ck_fast_trace_det(p, *cm, vh, boltzmann(vh, p.vw, p.sw), tr, de);
            if (std::abs(tr) < 1e-8) break;
            if ((tr < 0.0) == (tlo < 0.0)) {
                vlo = vh;
                tlo = tr;
            } else {
                vhi = vh;
            }
        }
        const auto ch = ck_branch_c_of_v(p, vh);
        if (ch) out.hopfs.push_back({*ch, vh});
    }

    // periodic branch: continue the spiking envelope in frozen c.  Just below
    // the lower fold the hyperpolarized node is gone, so any start lands on
    // the cycle; from there continue in both directions with warm starts.
    if (out.folds.size() >= 2) {
        const double c_f1 = out.folds.front().c;
        double c_start = c_f1 - cfg.envelope_dc;
        CkFast::State cold{-20.0, boltzmann(-20.0, p.vw, p.sw)};
        auto first = measure_envelope_point(p, c_start, cold, cfg);
        if (!first.alive) {
            c_start = c_f1 + cfg.envelope_dc;
            first = measure_envelope_point(p, c_start, cold, cfg);
        }
        if (first.alive) {
            std::vector<EnvelopePoint> up, down;
            up.push_back({c_start, first.v_min, first.v_max, first.period});

            // upward until the cycle dies; that bracket holds the homoclinic
            CkFast::State warm = first.final;
            double last_alive = c_start, first_dead = -1.0;
            for (double c = c_start + cfg.envelope_dc; c <= cfg.c_max;
                 c += cfg.envelope_dc) {
                const auto m = measure_envelope_point(p, c, warm, cfg);
                if (!m.alive) {
                    first_dead = c;
                    break;
                }
                up.push_back({c, m.v_min, m.v_max, m.period});
                warm = m.final;
                last_alive = c;
            }
            if (first_dead > 0.0) {
                double lo = last_alive, hi = first_dead;
                CkFast::State seed = warm;
                while (hi - lo > cfg.homoclinic_tol) {
                    const double mid = 0.5 * (lo + hi);
                    const auto m = measure_envelope_point(p, mid, seed, cfg);
                    if (m.alive) {
                        lo = mid;
                        seed = m.final;
                    } else {
                        hi = mid;
                    }
                }
                out.homoclinic_c = 0.5 * (lo + hi);
            }

            // downward until the amplitude collapses near the Hopf
            warm = first.final;
            for (double c = c_start - cfg.envelope_dc; c > 0.0;
                 c -= cfg.envelope_dc) {
                const auto m = measure_envelope_point(p, c, warm, cfg);
                if (!m.alive) break;
                down.push_back({c, m.v_min, m.v_max, m.period});
                warm = m.final;
            }
            out.envelope.assign(down.rbegin(), down.rend());
            out.envelope.insert(out.envelope.end(), up.begin(), up.end());
        }
    }

    return out;
}

}  // namespace homeodyn
