#include "homeodyn/models.hpp"

#include <cmath>
#include <utility>

namespace homeodyn {

namespace {

template <class P, std::size_t N>
double* lookup(P& p, std::string_view name,
               const std::pair<const char*, double P::*> (&table)[N]) {
  for (const auto& [key, member] : table)
    if (name == key) return &(p.*member);
  return nullptr;
}

void require(bool ok, const char* msg) {
  if (!ok) throw ConfigError(msg);
}

template <class P, std::size_t N>
std::vector<std::string> names_of(const std::pair<const char*, double P::*> (&table)[N]) {
  std::vector<std::string> out;
  out.reserve(N);
  for (const auto& [key, member] : table) out.emplace_back(key);
  return out;
}

constexpr std::pair<const char*, double FhnParams::*> kFhnTable[] = {
    {"mu", &FhnParams::mu}, {"alpha", &FhnParams::alpha}, {"J", &FhnParams::J}};

constexpr std::pair<const char*, double CkParams::*> kCkTable[] = {
    {"gCa", &CkParams::gCa},       {"gK", &CkParams::gK},
    {"gKCa", &CkParams::gKCa},     {"gKATP", &CkParams::gKATP},
    {"Cm", &CkParams::Cm},         {"Iap", &CkParams::Iap},
    {"vm", &CkParams::vm},         {"sm", &CkParams::sm},
    {"vw", &CkParams::vw},         {"sw", &CkParams::sw},
    {"VCa", &CkParams::VCa},       {"VK", &CkParams::VK},
    {"tau_w", &CkParams::tau_w},   {"p", &CkParams::p},
    {"KOmega", &CkParams::KOmega}, {"f", &CkParams::f},
    {"beta", &CkParams::beta},     {"kc", &CkParams::kc}};

constexpr std::pair<const char*, double PbmParams::*> kPbmTable[] = {
    {"gCa", &PbmParams::gCa},         {"gK", &PbmParams::gK},
    {"gKCa", &PbmParams::gKCa},       {"gKATP", &PbmParams::gKATP},
    {"Cm", &PbmParams::Cm},           {"vm", &PbmParams::vm},
    {"sm", &PbmParams::sm},           {"vw", &PbmParams::vw},
    {"sw", &PbmParams::sw},           {"VCa", &PbmParams::VCa},
    {"VK", &PbmParams::VK},           {"tau_w", &PbmParams::tau_w},
    {"tau_a", &PbmParams::tau_a},     {"r", &PbmParams::r},
    {"s_a", &PbmParams::s_a},         {"Kd", &PbmParams::Kd},
    {"p_leak", &PbmParams::p_leak},   {"SERCA2b", &PbmParams::SERCA2b},
    {"SERCA3", &PbmParams::SERCA3},   {"kPMCA", &PbmParams::kPMCA},
    {"f_cyt", &PbmParams::f_cyt},     {"f_er", &PbmParams::f_er},
    {"vol_ratio", &PbmParams::vol_ratio}, {"beta", &PbmParams::beta}};

}  // namespace

double* FhnParams::ptr(std::string_view name) { return lookup(*this, name, kFhnTable); }

std::vector<std::string> FhnParams::param_names() { return names_of(kFhnTable); }

void FhnParams::validate() const {
  require(mu > 0.0, "fhn: mu must be positive");
}

std::vector<std::string> FhnParams::warnings() const {
  std::vector<std::string> w;
  if (mu < 5.0)
    w.push_back("fhn: mu < 5, timescale separation is weak");
  if (alpha <= 1.0)
    w.push_back("fhn: alpha <= 1, equilibrium may not be unique and chair analyses do not apply");
  return w;
}

Fhn::State fhn_equilibrium(const FhnParams& p) {
  p.validate();
  if (p.alpha <= 1.0)
    throw ConfigError("fhn_equilibrium: requires alpha > 1 (unique equilibrium)");
  // g(x) = x^3/3 + (alpha-1)x + J is strictly increasing, so bisection on a
  // sign-changing bracket converges to the unique root.
  const double a1 = p.alpha - 1.0;
  const auto g = [&](double x) { return x * x * x / 3.0 + a1 * x + p.J; };
  double hi = 1.0;
  while (g(hi) < 0.0) hi *= 2.0;
  double lo = -1.0;
  while (g(lo) > 0.0) lo *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  // One Newton polish; g'(x) >= alpha-1 > 0.
  x -= g(x) / (x * x + a1);
  return {x, p.J + p.alpha * x};
}

TraceDet fhn_jacobian_trace_det(double x_star, const FhnParams& p) {
  TraceDet td;
  td.trace = p.mu * (1.0 - x_star * x_star) - 1.0 / p.mu;
  td.det = x_star * x_star + p.alpha - 1.0;
  return td;
}

double* CkParams::ptr(std::string_view name) { return lookup(*this, name, kCkTable); }

std::vector<std::string> CkParams::param_names() { return names_of(kCkTable); }

void CkParams::validate() const {
  require(gCa >= 0.0 && gK >= 0.0 && gKCa >= 0.0 && gKATP >= 0.0,
          "ck: conductances must be non-negative");
  require(Cm > 0.0, "ck: Cm must be positive");
  require(tau_w > 0.0, "ck: tau_w must be positive");
  require(sm != 0.0 && sw != 0.0, "ck: activation slopes must be non-zero");
  require(KOmega > 0.0, "ck: KOmega must be positive");
  require(p >= 1.0, "ck: Hill exponent must be >= 1");
  require(f > 0.0 && f <= 1.0, "ck: f must be in (0, 1]");
  require(beta >= 0.0, "ck: beta must be non-negative");
  require(kc >= 0.0, "ck: kc must be non-negative");
}

double* PbmParams::ptr(std::string_view name) { return lookup(*this, name, kPbmTable); }

std::vector<std::string> PbmParams::param_names() { return names_of(kPbmTable); }

void PbmParams::validate() const {
  require(gCa >= 0.0 && gK >= 0.0 && gKCa >= 0.0 && gKATP >= 0.0,
          "pbm: conductances must be non-negative");
  require(Cm > 0.0, "pbm: Cm must be positive");
  require(tau_w > 0.0 && tau_a > 0.0, "pbm: time constants must be positive");
  require(sm != 0.0 && sw != 0.0 && s_a != 0.0, "pbm: activation slopes must be non-zero");
  require(Kd > 0.0, "pbm: Kd must be positive");
  require(p_leak >= 0.0 && SERCA2b >= 0.0 && SERCA3 >= 0.0 && kPMCA >= 0.0,
          "pbm: fluxes must be non-negative");
  require(f_cyt > 0.0 && f_cyt <= 1.0 && f_er > 0.0 && f_er <= 1.0,
          "pbm: Ca buffering fractions must be in (0, 1]");
  require(vol_ratio > 0.0, "pbm: volume ratio must be positive");
}

ModelSystem ModelSystem::make(std::string_view name) {
  if (name == "fhn") return {Fhn{}};
  if (name == "chay-keizer" || name == "ck") return {ChayKeizer{}};
  if (name == "pbm") return {Pbm{}};
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected fhn, chay-keizer or pbm)");
}

ModelKind ModelSystem::kind() const {
  return std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, Fhn>) return ModelKind::fhn;
        else if constexpr (std::is_same_v<M, ChayKeizer>) return ModelKind::chay_keizer;
        else return ModelKind::pbm;
      },
      model);
}

std::string_view ModelSystem::name() const {
  return std::visit([](const auto& m) -> std::string_view { return m.model_name; }, model);
}

std::size_t ModelSystem::dim() const {
  return std::visit([](const auto& m) { return m.state_labels.size(); }, model);
}

std::vector<std::string> ModelSystem::labels() const {
  return std::visit(
      [](const auto& m) {
        return std::vector<std::string>(m.state_labels.begin(), m.state_labels.end());
      },
      model);
}

std::vector<double> ModelSystem::default_x0() const {
  return std::visit(
      [](const auto& m) {
        const auto x0 = m.default_x0();
        return std::vector<double>(x0.begin(), x0.end());
      },
      model);
}

double ModelSystem::get_param(std::string_view name) const {
  return std::visit(
      [&](const auto& m) {
        const double* p = m.p.ptr(name);
        if (!p)
          throw ConfigError("unknown parameter '" + std::string(name) + "' for model " +
                            std::string(m.model_name));
        return *p;
      },
      model);
}

void ModelSystem::set_param(std::string_view name, double value) {
  std::visit(
      [&](auto& m) {
        double* p = m.p.ptr(name);
        if (!p)
          throw ConfigError("unknown parameter '" + std::string(name) + "' for model " +
                            std::string(m.model_name));
        *p = value;
      },
      model);
}

std::vector<std::string> ModelSystem::param_names() const {
  return std::visit(
      [](const auto& m) { return std::decay_t<decltype(m.p)>::param_names(); }, model);
}

void ModelSystem::validate() const {
  std::visit([](const auto& m) { m.p.validate(); }, model);
}

std::vector<std::string> ModelSystem::warnings() const {
  if (const auto* f = std::get_if<Fhn>(&model)) return f->p.warnings();
  return {};
}

std::string ModelSystem::slow_label() const {
  return kind() == ModelKind::fhn ? "y" : "c";
}

std::string ModelSystem::fast_label() const {
  return kind() == ModelKind::fhn ? "x" : "V";
}

}  // namespace homeodyn
