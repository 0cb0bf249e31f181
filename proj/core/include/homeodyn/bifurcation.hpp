#pragma once
// equilibrium structure: Hopf points of the planar cubic model and the
// frozen-calcium fast-subsystem diagram of the bursting model
#include <array>
#include <optional>
#include <vector>

#include "homeodyn/models.hpp"

namespace homeodyn {

// --- planar cubic model ------------------------------------------------------

struct FhnHopfPoints {
    double j_minus = 0.0;
    double j_plus = 0.0;
    double x_at_j_minus = 0.0;  // equilibrium x at the left Hopf (+sqrt(q))
    double x_at_j_plus = 0.0;   // equilibrium x at the right Hopf (-sqrt(q))
};

// closed form from trace = 0: x*^2 = q = 1 - 1/mu^2,
// J = -x*^3/3 - (alpha-1) x*; sorted so j_minus < j_plus
FhnHopfPoints fhn_hopf_points(const FhnParams& p);

struct FhnHopfLocusPoint {
    double alpha = 0.0;
    double j_minus = 0.0;
    double j_plus = 0.0;
};

std::vector<FhnHopfLocusPoint> fhn_hopf_locus(const FhnParams& base, double alpha_lo,
                                              double alpha_hi, double step);

// --- bursting model fast subsystem ------------------------------------------

// the (V, w) spiking subsystem with the slow Ca concentration frozen as a
// parameter; reads only the fast parameters, so diagrams cannot depend on
// kc, f or beta
struct CkFast {
    using Params = CkParams;
    using State = std::array<double, 2>;
    static constexpr const char* model_name = "chay-keizer-fast";
    static constexpr std::array<const char*, 2> state_labels{"V", "w"};

    CkParams p;
    double c = 0.1;  // frozen

    void rhs(const State& s, State& d) const {
        const CkCurrents I = ck_currents(s[0], s[1], c, p);
        d[0] = -(I.ICa + I.IK + I.IKCa + I.IKATP - p.Iap) / p.Cm;
        d[1] = (boltzmann(s[0], p.vw, p.sw) - s[1]) / p.tau_w;
    }
};

enum class EqStability { stable, unstable, saddle };

const char* to_string(EqStability s);

struct BranchPoint {
    double c = 0.0;
    double V = 0.0;
    double w = 0.0;
    double trace = 0.0;
    double det = 0.0;
    EqStability stability = EqStability::stable;
};

struct FoldPoint {
    double c = 0.0;
    double V = 0.0;
};

struct HopfPoint {
    double c = 0.0;
    double V = 0.0;
};

struct EnvelopePoint {
    double c = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
    double period = 0.0;  // ms, mean spacing of mid-range V crossings
};

struct FastDiagramConfig {
    double v_lo = -74.5;  // mV, equilibrium-branch scan range
    double v_hi = -10.0;
    double dv = 0.005;
    double c_max = 2.0;             // drop branch rows beyond this concentration
    double envelope_dc = 0.002;     // uM, periodic-branch continuation step
    double envelope_discard = 2000.0;  // ms of transient per frozen c
    double envelope_window = 2000.0;   // ms measured per frozen c
    double envelope_dt = 0.05;         // ms
    double homoclinic_tol = 1e-4;      // uM bracket width for the bisection

    void validate() const;
};

struct FastDiagram {
    std::vector<BranchPoint> branch;      // ordered by V
    std::vector<FoldPoint> folds;         // ordered by c
    std::vector<HopfPoint> hopfs;
    std::vector<EnvelopePoint> envelope;  // ordered by c
    double homoclinic_c = 0.0;            // 0 when no estimate was possible
};

// trace and determinant of the fast-subsystem Jacobian at (V, w), frozen c;
// central differences
void ck_fast_trace_det(const CkParams& p, double c, double V, double w,
                       double& trace, double& det);

// equilibrium-branch inversion: the c at which (V, w_inf(V)) is a
// fast-subsystem equilibrium, or no value when none exists
std::optional<double> ck_branch_c_of_v(const CkParams& p, double V);

FastDiagram ck_fast_diagram(const CkParams& p, const FastDiagramConfig& cfg = {});

}  // namespace homeodyn
