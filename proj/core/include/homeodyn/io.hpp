#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "homeodyn/analysis.hpp"
#include "homeodyn/bifurcation.hpp"
#include "homeodyn/models.hpp"
#include "homeodyn/noise.hpp"
#include "homeodyn/trajectory.hpp"

namespace homeodyn {

/// 17 significant digits: round-trips a double exactly.
std::string format_g17(double v);

// ---------------------------------------------------------------------------
// Flat key=value config files.  '#' starts a comment, blank lines are
// skipped, later assignments win.  Recognized keys:
//   model                      model name (fhn | chay-keizer | pbm)
//   <param>                    any parameter of the chosen model
//   noise.{target,dist,mean,sigma,refresh,seed}
//   integrator.{method,dt,t_end,record_stride}
//   sweep.{input,lo,hi,step,discard,window,warm_start}
// Unknown keys are rejected at apply time.
// ---------------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text, const std::string& origin = "<config>");
ConfigMap parse_config_file(const std::string& path);

/// Strict scalar parses; the key is included in the error message.
double config_double(const std::string& key, const std::string& value);
std::int64_t config_int(const std::string& key, const std::string& value);
bool config_bool(const std::string& key, const std::string& value);

/// Apply every plain (un-dotted) key except "model" as a parameter override.
void apply_param_overrides(ModelSystem& sys, const ConfigMap& cfg);

/// Build a noise process from the noise.* keys; nullopt when none present.
/// default_target is used when noise.target is absent ("" = require explicit).
std::optional<NoiseProcess> noise_from_config(const ConfigMap& cfg,
                                              const std::string& default_target);

/// Parse the compact CLI form "dist:key=val,key=val", e.g.
/// "folded-normal:sigma=0.04,refresh=1000".
NoiseProcess parse_noise_spec(const std::string& spec, const std::string& default_target);

/// Throw ConfigError on the first key that is neither a reserved key nor a
/// parameter of `sys`.
void check_known_keys(const ModelSystem& sys, const ConfigMap& cfg);

// ---------------------------------------------------------------------------
// CSV output.  All numeric fields use 17 significant digits.
// ---------------------------------------------------------------------------

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Columns: input, average (one per observable, suffixed when several),
/// state_label, period, duty_cycle, seed, error.
void write_chair_csv(std::ostream& os, const ChairCurve& curve);

/// Sectioned CSV: '# section' comment lines separate branch / folds / hopf /
/// envelope / homoclinic blocks, each with its own header row.
void write_fast_diagram_csv(std::ostream& os, const FastDiagram& diagram);

// ---------------------------------------------------------------------------
// Run manifests.  One JSON file written alongside every output; re-running
// the recorded argv reproduces the outputs byte-identically.
// ---------------------------------------------------------------------------

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string version;
  std::optional<std::uint64_t> seed;
  ConfigMap resolved;  // full key=value state after defaults and overrides
  std::vector<std::string> outputs;
};

void write_manifest(std::ostream& os, const RunManifest& m);
RunManifest read_manifest(const std::string& path);

}  // namespace homeodyn
