#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "homeodyn/errors.hpp"

namespace homeodyn {

/// Sigmoidal steady-state activation 1 / (1 + exp((v_half - v) / slope)).
inline double boltzmann(double v, double v_half, double slope) {
  if (slope == 0.0) throw ConfigError("boltzmann: zero slope");
  return 1.0 / (1.0 + std::exp((v_half - v) / slope));
}

/// Hill saturation c^p / (k^p + c^p).  p = 5 gets a pow-free fast path since
/// it sits inside every integration step of both conductance models.
inline double hill(double c, double k, double p) {
  double cp, kp;
  if (p == 5.0) {
    const double c2 = c * c, k2 = k * k;
    cp = c2 * c2 * c;
    kp = k2 * k2 * k;
  } else {
    cp = std::pow(c, p);
    kp = std::pow(k, p);
  }
  return cp / (kp + cp);
}

// ---------------------------------------------------------------------------
// Fast-slow cubic oscillator (FitzHugh-Nagumo form).
//   x' = mu (x - x^3/3 - y)
//   y' = (J + alpha x - y) / mu
// x is fast and y slow for mu >> 1.
// ---------------------------------------------------------------------------

struct FhnParams {
  double mu = 30.0;
  double alpha = 2.0;
  double J = 0.0;

  double* ptr(std::string_view name);
  const double* ptr(std::string_view name) const {
    return const_cast<FhnParams*>(this)->ptr(name);
  }
  static std::vector<std::string> param_names();
  void validate() const;
  std::vector<std::string> warnings() const;
};

struct Fhn {
  using Params = FhnParams;
  using State = std::array<double, 2>;
  static constexpr const char* model_name = "fhn";
  static constexpr std::array<const char*, 2> state_labels{"x", "y"};
  static constexpr std::array<bool, 2> fast_variable{true, false};

  FhnParams p;

  void rhs(const State& s, State& d) const {
    const double x = s[0], y = s[1];
    d[0] = p.mu * (x - x * x * x / 3.0 - y);
    d[1] = (p.J + p.alpha * x - y) / p.mu;
  }

  State default_x0() const { return {2.0, 0.0}; }
};

/// Unique equilibrium (x*, y*) for alpha > 1: the real root of
/// x^3/3 + (alpha-1)x + J = 0, with y* = J + alpha x*.  |residual| < 1e-12.
Fhn::State fhn_equilibrium(const FhnParams& p);

/// Trace and determinant of the equilibrium Jacobian.
struct TraceDet {
  double trace = 0.0;
  double det = 0.0;
};
TraceDet fhn_jacobian_trace_det(double x_star, const FhnParams& p);

// ---------------------------------------------------------------------------
// Three-variable bursting model: Ca^2+- and ATP-gated K+ channels on top of a
// planar spiking subsystem (Chay-Keizer form, reduced).  Units: mV, ms, uM,
// fA, pS, fF.
//   V' = -(ICa + IK + IKCa + IKATP - Iap) / Cm
//   w' = (w_inf(V) - w) / tau_w
//   c' = -f (beta ICa + kc c)
// ---------------------------------------------------------------------------

struct CkParams {
  double gCa = 1200.0;   // pS
  double gK = 3000.0;    // pS
  double gKCa = 300.0;   // pS
  double gKATP = 230.0;  // pS
  double Cm = 5300.0;    // fF
  double Iap = 500.0;    // fA
  double vm = -20.0;     // mV
  double sm = 12.0;      // mV
  double vw = -16.0;     // mV
  double sw = 5.0;       // mV
  double VCa = 25.0;     // mV
  double VK = -75.0;     // mV
  double tau_w = 16.0;   // ms
  double p = 5.0;
  double KOmega = 0.3;     // uM
  double f = 0.001;        // fraction of free Ca
  double beta = 2.25e-6;   // uM fA^-1 ms^-1
  double kc = 0.07;        // ms^-1

  double* ptr(std::string_view name);
  const double* ptr(std::string_view name) const {
    return const_cast<CkParams*>(this)->ptr(name);
  }
  static std::vector<std::string> param_names();
  void validate() const;
};

struct CkCurrents {
  double ICa = 0.0, IK = 0.0, IKCa = 0.0, IKATP = 0.0;
};

inline CkCurrents ck_currents(double v, double w, double c, const CkParams& p) {
  if (c < 0.0) throw NumericsError("ck_currents: negative Ca concentration");
  CkCurrents out;
  const double m_inf = boltzmann(v, p.vm, p.sm);
  out.ICa = p.gCa * m_inf * (v - p.VCa);
  out.IK = p.gK * w * (v - p.VK);
  out.IKCa = p.gKCa * hill(c, p.KOmega, p.p) * (v - p.VK);
  out.IKATP = p.gKATP * (v - p.VK);
  return out;
}

struct ChayKeizer {
  using Params = CkParams;
  using State = std::array<double, 3>;
  static constexpr const char* model_name = "chay-keizer";
  static constexpr std::array<const char*, 3> state_labels{"V", "w", "c"};
  static constexpr std::array<bool, 3> fast_variable{true, true, false};

  CkParams p;

  void rhs(const State& s, State& d) const {
    const double v = s[0], w = s[1], c = s[2];
    const CkCurrents I = ck_currents(v, w, c, p);
    d[0] = -(I.ICa + I.IK + I.IKCa + I.IKATP - p.Iap) / p.Cm;
    d[1] = (boltzmann(v, p.vw, p.sw) - w) / p.tau_w;
    d[2] = -p.f * (p.beta * I.ICa + p.kc * c);
  }

  State default_x0() const { return {-65.0, 0.0, 0.1}; }
};

// ---------------------------------------------------------------------------
// Five-variable islet model: adds an ER compartment and a slow ATP-sensitive
// gating variable a with Ca^2+-dependent activation.  Same units as above.
// The IKCa Hill exponent is fixed at 5.
// ---------------------------------------------------------------------------

struct PbmParams {
  double gCa = 1200.0;   // pS
  double gK = 3000.0;    // pS
  double gKCa = 600.0;   // pS
  double gKATP = 500.0;  // pS
  double Cm = 5300.0;    // fF
  double vm = -20.0;     // mV
  double sm = 12.0;      // mV
  double vw = -15.0;     // mV
  double sw = 5.0;       // mV
  double VCa = 25.0;     // mV
  double VK = -75.0;     // mV
  double tau_w = 18.0;   // ms
  double tau_a = 300000.0;  // ms
  double r = 0.225;         // uM, half-activation of a_inf
  double s_a = 0.1;         // uM
  double Kd = 0.4;          // uM
  double p_leak = 0.0002;   // ms^-1
  double SERCA2b = 0.02;    // uM ms^-1
  double SERCA3 = 0.2;      // ms^-1
  double kPMCA = 0.125;     // ms^-1
  double f_cyt = 0.001;
  double f_er = 0.01;
  double vol_ratio = 10.0;  // Vcyt / Ver
  double beta = 4.5e-6;     // uM fA^-1 ms^-1

  double* ptr(std::string_view name);
  const double* ptr(std::string_view name) const {
    return const_cast<PbmParams*>(this)->ptr(name);
  }
  static std::vector<std::string> param_names();
  void validate() const;
};

struct Pbm {
  using Params = PbmParams;
  using State = std::array<double, 5>;
  static constexpr const char* model_name = "pbm";
  static constexpr std::array<const char*, 5> state_labels{"V", "w", "c", "c_er", "a"};
  static constexpr std::array<bool, 5> fast_variable{true, true, false, false, false};

  PbmParams p;

  void rhs(const State& s, State& d) const {
    const double v = s[0], w = s[1], c = s[2], c_er = s[3], a = s[4];
    if (c < 0.0 || c_er < 0.0) throw NumericsError("pbm rhs: negative Ca concentration");
    const double ICa = p.gCa * boltzmann(v, p.vm, p.sm) * (v - p.VCa);
    const double IK = p.gK * w * (v - p.VK);
    const double IKCa = p.gKCa * hill(c, p.Kd, 5.0) * (v - p.VK);
    const double IKATP = p.gKATP * a * (v - p.VK);

    const double J_mem = -(p.beta * ICa + p.kPMCA * c);
    const double J_serca = p.SERCA2b + p.SERCA3 * c;
    const double J_leak = p.p_leak * (c_er - c);
    const double J_er = J_leak - J_serca;

    d[0] = -(ICa + IK + IKCa + IKATP) / p.Cm;
    d[1] = (boltzmann(v, p.vw, p.sw) - w) / p.tau_w;
    d[2] = p.f_cyt * (J_mem + J_er);
    d[3] = -p.f_er * p.vol_ratio * J_er;
    d[4] = (a_inf(c) - a) / p.tau_a;
  }

  double a_inf(double c) const { return 1.0 / (1.0 + std::exp((p.r - c) / p.s_a)); }

  State default_x0() const { return {-60.0, 0.0, 0.1, 100.0, 0.46}; }
};

// ---------------------------------------------------------------------------
// Runtime-polymorphic wrapper used by the CLI and analysis layers.
// ---------------------------------------------------------------------------

enum class ModelKind { fhn, chay_keizer, pbm };

struct ModelSystem {
  std::variant<Fhn, ChayKeizer, Pbm> model;

  static ModelSystem make(std::string_view name);

  ModelKind kind() const;
  std::string_view name() const;
  std::size_t dim() const;
  std::vector<std::string> labels() const;
  std::vector<double> default_x0() const;
  std::vector<std::string> param_names() const;
  double get_param(std::string_view name) const;
  void set_param(std::string_view name, double value);
  void validate() const;
  std::vector<std::string> warnings() const;

  /// Primary slow variable used for quiescence classification and period
  /// estimation ("y" / "c").
  std::string slow_label() const;
  /// Primary fast variable used for duty cycle ("x" / "V").
  std::string fast_label() const;
};

}  // namespace homeodyn
