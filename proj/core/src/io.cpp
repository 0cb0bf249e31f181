#include "homeodyn/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace homeodyn {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigMap parse_config_text(const std::string& text, const std::string& origin) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value, got '" +
                        line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (value.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty value for '" + key + "'");
    out[key] = value;  // later assignments win
  }
  return out;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

double config_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size() || value.empty() || errno == ERANGE)
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  return v;
}

std::int64_t config_int(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size() || value.empty() || errno == ERANGE)
    throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

bool config_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

void apply_param_overrides(ModelSystem& sys, const ConfigMap& cfg) {
  for (const auto& [key, value] : cfg) {
    if (key == "model" || key.find('.') != std::string::npos) continue;
    sys.set_param(key, config_double(key, value));
  }
}

namespace {

const std::set<std::string> kNoiseKeys = {"target", "dist", "mean", "sigma", "refresh", "seed"};
const std::set<std::string> kIntegratorKeys = {"method", "dt", "t_end", "record_stride"};
const std::set<std::string> kSweepKeys = {"input", "lo", "hi", "step",
                                          "discard", "window", "warm_start"};

void set_noise_field(NoiseProcess& proc, const std::string& key, const std::string& value) {
  if (key == "target")
    proc.target = value;
  else if (key == "dist")
    proc.dist = parse_noise_dist(value);
  else if (key == "mean")
    proc.mean = config_double(key, value);
  else if (key == "sigma")
    proc.sigma = config_double(key, value);
  else if (key == "refresh")
    proc.refresh_interval = config_double(key, value);
  else if (key == "seed")
    proc.seed = static_cast<std::uint64_t>(config_int(key, value));
  else
    throw ConfigError("unknown noise key '" + key + "'");
}

}  // namespace

std::optional<NoiseProcess> noise_from_config(const ConfigMap& cfg,
                                              const std::string& default_target) {
  NoiseProcess proc;
  bool any = false, have_dist = false;
  for (const auto& [key, value] : cfg) {
    if (key.rfind("noise.", 0) != 0) continue;
    any = true;
    if (key == "noise.dist") have_dist = true;
    set_noise_field(proc, key.substr(6), value);
  }
  if (!any) return std::nullopt;
  if (!have_dist) throw ConfigError("noise.dist is required (normal | folded-normal)");
  if (proc.target.empty()) {
    if (default_target.empty())
      throw ConfigError("noise.target is required for this model");
    proc.target = default_target;
  }
  proc.validate();
  return proc;
}

NoiseProcess parse_noise_spec(const std::string& spec, const std::string& default_target) {
  NoiseProcess proc;
  const auto colon = spec.find(':');
  proc.dist = parse_noise_dist(spec.substr(0, colon));
  if (colon != std::string::npos) {
    std::istringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ConfigError("noise spec: expected key=value, got '" + item + "'");
      set_noise_field(proc, trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
    }
  }
  if (proc.target.empty()) {
    if (default_target.empty())
      throw ConfigError("noise spec: target= is required for this model");
    proc.target = default_target;
  }
  proc.validate();
  return proc;
}

void check_known_keys(const ModelSystem& sys, const ConfigMap& cfg) {
  for (const auto& [key, value] : cfg) {
    (void)value;
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
      if (key == "model") continue;
      sys.get_param(key);  // throws ConfigError when unknown
      continue;
    }
    const std::string group = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    const std::set<std::string>* known = nullptr;
    if (group == "noise")
      known = &kNoiseKeys;
    else if (group == "integrator")
      known = &kIntegratorKeys;
    else if (group == "sweep")
      known = &kSweepKeys;
    if (!known || !known->count(field)) throw ConfigError("unknown config key '" + key + "'");
  }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (const auto& l : traj.labels) os << "," << l;
  os << "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_g17(traj.time_at(i));
    for (const auto& col : traj.cols) os << "," << format_g17(col[i]);
    os << "\n";
  }
}

void write_chair_csv(std::ostream& os, const ChairCurve& curve) {
  os << "input";
  if (curve.labels.size() == 1)
    os << ",average";
  else
    for (const auto& l : curve.labels) os << ",average_" << l;
  os << ",state_label,period,duty_cycle,seed,input_effective,error\n";
  for (const auto& pt : curve.points) {
    os << format_g17(pt.input);
    for (double a : pt.averages) os << "," << format_g17(a);
    os << "," << (pt.error.empty() ? to_string(pt.state) : "error");
    os << "," << format_g17(pt.period);
    os << "," << format_g17(pt.duty);
    os << ",";
    if (pt.seed) os << *pt.seed;
    os << "," << format_g17(pt.input_effective) << ",";
    if (!pt.error.empty()) {
      std::string msg = pt.error;
      for (auto& ch : msg)
        if (ch == ',' || ch == '\n') ch = ';';
      os << msg;
    }
    os << "\n";
  }
}

void write_fast_diagram_csv(std::ostream& os, const FastDiagram& diagram) {
  os << "# branch\n";
  os << "c,V,w,trace,det,stability\n";
  for (const auto& b : diagram.branch) {
    const char* st = b.stability == EqStability::stable    ? "stable"
                     : b.stability == EqStability::saddle  ? "saddle"
                                                           : "unstable";
    os << format_g17(b.c) << "," << format_g17(b.V) << "," << format_g17(b.w) << ","
       << format_g17(b.trace) << "," << format_g17(b.det) << "," << st << "\n";
  }
  os << "# folds\n";
  os << "c,V\n";
  for (const auto& f : diagram.folds)
    os << format_g17(f.c) << "," << format_g17(f.V) << "\n";
  os << "# hopf\n";
  os << "c,V\n";
  for (const auto& h : diagram.hopfs)
    os << format_g17(h.c) << "," << format_g17(h.V) << "\n";
  os << "# envelope\n";
  os << "c,v_min,v_max,period\n";
  for (const auto& e : diagram.envelope)
    os << format_g17(e.c) << "," << format_g17(e.v_min) << "," << format_g17(e.v_max) << ","
       << format_g17(e.period) << "\n";
  os << "# homoclinic\n";
  os << "c\n";
  os << format_g17(diagram.homoclinic_c) << "\n";
}

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

void write_manifest(std::ostream& os, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["version"] = m.version;
  if (m.seed)
    j["seed"] = *m.seed;
  else
    j["seed"] = nullptr;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.resolved) cfg[k] = v;
  j["config"] = cfg;
  j["outputs"] = m.outputs;
  os << j.dump(2) << "\n";
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("manifest '" + path + "': " + e.what());
  }
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.version = j.at("version").get<std::string>();
  if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [k, v] : j.at("config").items()) m.resolved[k] = v.get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

}  // namespace homeodyn
