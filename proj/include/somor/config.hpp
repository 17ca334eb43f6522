// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configurations for batch campaigns.  A config is one JSON file with
// explicit keys: the system source (manifest path or synthetic generator
// spec), the evaluation band and grid, the method matrix, the reduced-order
// schedule, and scoring parameters.  Loading performs type checking only;
// validate() turns semantic problems into a list of coded diagnostics so a
// front end can surface all of them at once without executing anything.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "somor/error.hpp"
#include "somor/manifest.hpp"
#include "somor/reduce.hpp"
#include "somor/synthetic.hpp"
#include "somor/system.hpp"

namespace somor {

/// One row of the method matrix.  `strategies` applies to the presampled
/// methods (equi, avg, minrel, greedy); sobt rows list balancing variants
/// (v, fv, vpm, pm, pv, vp, p, so) or the one-sided pseudo-variants
/// (input, output) in `variants` instead of projection variants.
struct MethodSpec {
  std::string method;                   // equi | avg | minrel | greedy | sobt
  std::vector<std::string> strategies;  // standard | sp | soa
  std::vector<std::string> variants;
  double greedy_tol = 0.0;              // 0 disables the error-based stop
};

struct RunConfig {
  std::string manifest;  // empty when a synthetic spec is given
  std::optional<SyntheticModelSpec> synthetic;

  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
  Eigen::Index grid_points = 0;

  Eigen::Index shift_count = 0;  // interpolation plan size for presampled methods
  std::vector<double> extra_shifts_hz;

  std::vector<MethodSpec> methods;
  std::vector<Eigen::Index> r_schedule;

  double morscore_eps = 1e-8;
  Eigen::Index morscore_r_max = 0;  // 0: largest schedule entry

  std::string out_dir = "somor-out";
  std::uint64_t seed = 1;
  bool synthetic_seed_pinned = false;  // synthetic block carries its own seed
  bool record_timing = true;
  bool export_models = false;
  int sp_order = -1;  // Hermite order override; -1 keeps the per-case default
  int jobs = 1;

  std::string config_dir;  // directory of the config file, for relative paths
  nlohmann::json echo;     // parsed config, echoed into the run summary
};

/// A semantic problem found by validate(): a stable machine-readable code,
/// a human-readable detail, and the combination tag when the problem is
/// specific to one method combination.
struct Diagnostic {
  std::string code;
  std::string detail;
  std::string combination;
};

namespace detail {

inline SyntheticModelSpec synthetic_from_json(const nlohmann::json& j) {
  SyntheticModelSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  spec.n = j.at("n").get<long long>();
  spec.seed = j.value("seed", static_cast<std::uint64_t>(spec.seed));
  spec.alpha = j.value("alpha", spec.alpha);
  spec.beta = j.value("beta", spec.beta);
  spec.eta = j.value("eta", spec.eta);
  spec.speed = j.value("speed", spec.speed);
  spec.admittance = j.value("admittance", spec.admittance);
  spec.nonlinear_count = j.value("nonlinear_count", spec.nonlinear_count);
  spec.nonlinear_scale = j.value("nonlinear_scale", spec.nonlinear_scale);
  spec.tva_count = j.value("tva_count", spec.tva_count);
  if (j.contains("tva_tune_hz"))
    spec.tva_tune_hz = j.at("tva_tune_hz").get<std::vector<double>>();
  spec.band_lo_hz = j.value("band_lo_hz", spec.band_lo_hz);
  spec.band_hi_hz = j.value("band_hi_hz", spec.band_hi_hz);
  if (j.contains("input_nodes"))
    for (long long v : j.at("input_nodes").get<std::vector<long long>>())
      spec.input_nodes.push_back(v);
  if (j.contains("output_nodes"))
    for (long long v : j.at("output_nodes").get<std::vector<long long>>())
      spec.output_nodes.push_back(v);
  return spec;
}

inline std::vector<Eigen::Index> schedule_from_json(const nlohmann::json& j) {
  std::vector<Eigen::Index> schedule;
  if (j.is_array()) {
    for (long long v : j.get<std::vector<long long>>()) schedule.push_back(v);
    return schedule;
  }
  require(j.is_object(), ErrorCode::BadConfig,
          "r_schedule must be a list or a {from, to, step} range");
  long long from = j.at("from").get<long long>();
  long long to = j.at("to").get<long long>();
  long long step = j.value("step", 1LL);
  require(step >= 1, ErrorCode::BadConfig, "r_schedule step must be at least 1");
  for (long long r = from; r <= to; r += step) schedule.push_back(r);
  return schedule;
}

inline MethodSpec method_from_json(const nlohmann::json& j) {
  MethodSpec spec;
  spec.method = j.at("method").get<std::string>();
  if (j.contains("strategies"))
    spec.strategies = j.at("strategies").get<std::vector<std::string>>();
  if (j.contains("variants"))
    spec.variants = j.at("variants").get<std::vector<std::string>>();
  spec.greedy_tol = j.value("tol", 0.0);
  return spec;
}

}  // namespace detail

/// Parse a run config file.  Throws IoFailure for unreadable or non-JSON
/// input and BadConfig for type-level schema violations; semantic checks
/// live in validate().
inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoFailure, "cannot open '" + path + "' for reading");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  require(!j.is_discarded(), ErrorCode::IoFailure, "'" + path + "' is not valid JSON");
  require(j.is_object(), ErrorCode::BadConfig, "run config must be a JSON object");

  try {
    RunConfig cfg;
    cfg.echo = j;
    cfg.config_dir = std::filesystem::path(path).parent_path().string();
    if (j.contains("system")) {
      const nlohmann::json& sysj = j.at("system");
      if (sysj.contains("manifest")) cfg.manifest = sysj.at("manifest").get<std::string>();
      if (sysj.contains("synthetic"))
        cfg.synthetic = detail::synthetic_from_json(sysj.at("synthetic"));
    }
    if (j.contains("band")) {
      const nlohmann::json& band = j.at("band");
      cfg.band_lo_hz = band.value("lo_hz", 0.0);
      cfg.band_hi_hz = band.value("hi_hz", 0.0);
      cfg.grid_points = band.value("points", 0LL);
    }
    if (j.contains("shifts")) {
      const nlohmann::json& shifts = j.at("shifts");
      cfg.shift_count = shifts.value("count", 0LL);
      if (shifts.contains("extra_hz"))
        cfg.extra_shifts_hz = shifts.at("extra_hz").get<std::vector<double>>();
    }
    if (j.contains("methods"))
      for (const nlohmann::json& m : j.at("methods"))
        cfg.methods.push_back(detail::method_from_json(m));
    if (j.contains("r_schedule"))
      cfg.r_schedule = detail::schedule_from_json(j.at("r_schedule"));
    if (j.contains("morscore")) {
      const nlohmann::json& score = j.at("morscore");
      cfg.morscore_eps = score.value("eps", cfg.morscore_eps);
      cfg.morscore_r_max = score.value("r_max", 0LL);
    }
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.record_timing = j.value("record_timing", cfg.record_timing);
    cfg.export_models = j.value("export_models", cfg.export_models);
    cfg.sp_order = j.value("sp_order", cfg.sp_order);
    cfg.jobs = j.value("jobs", cfg.jobs);
    if (cfg.morscore_r_max == 0 && !cfg.r_schedule.empty())
      cfg.morscore_r_max = *std::max_element(cfg.r_schedule.begin(), cfg.r_schedule.end());
    if (cfg.synthetic) {
      cfg.synthetic_seed_pinned = j.at("system").at("synthetic").contains("seed");
      if (!cfg.synthetic_seed_pinned) cfg.synthetic->seed = cfg.seed;
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::BadConfig, "'" + path + "': " + e.what());
  }
}

/// Resolve the config's system source: load the manifest (relative paths
/// resolve against the config file) or run the synthetic generator.
inline StructuredSystem resolve_system(
    const RunConfig& cfg, const FunctionCatalog& catalog = FunctionCatalog::builtins()) {
  require(!cfg.manifest.empty() || cfg.synthetic.has_value(), ErrorCode::BadConfig,
          "run config names neither a manifest nor a synthetic system");
  if (!cfg.manifest.empty()) {
    std::filesystem::path p(cfg.manifest);
    if (p.is_relative() && !cfg.config_dir.empty())
      p = std::filesystem::path(cfg.config_dir) / p;
    return load_system(p.string(), catalog);
  }
  return generate_synthetic(*cfg.synthetic);
}

/// Balancing needs the constant-coefficient real Case A form with damping:
/// returns the reason code barring it, or nothing when applicable.
inline std::optional<std::string> sobt_applicability(const StructuredSystem& sys) {
  if (sys.case_tag != CaseTag::A) return "sobt_requires_case_a";
  if (!all_constant_coefficients(sys) || !constant_input(sys))
    return "sobt_requires_constant_system";
  if (max_imaginary_part(sys) != 0.0) return "sobt_requires_real_system";
  if (zero_damping(sys)) return "sobt_requires_nonzero_damping";
  return std::nullopt;
}

namespace detail {

inline bool known_method(const std::string& m) {
  return m == "equi" || m == "avg" || m == "minrel" || m == "greedy" || m == "sobt";
}

inline bool known_strategy(const std::string& s) {
  return s == "standard" || s == "sp" || s == "soa";
}

inline bool known_projection_variant(const std::string& v) {
  return v == "tsimag" || v == "tsreal" || v == "osimaginput" || v == "osrealinput" ||
         v == "osimagoutput" || v == "osrealoutput";
}

inline bool known_sobt_variant(const std::string& v) {
  return v == "v" || v == "fv" || v == "vpm" || v == "pm" || v == "pv" || v == "vp" ||
         v == "p" || v == "so" || v == "input" || v == "output";
}

}  // namespace detail

/// Combination tag used for file names and summary rows:
/// `<method>_<strategy>_<variant>` for presampled methods, `sobt_<variant>`
/// for balancing.
inline std::string combination_tag(const std::string& method, const std::string& strategy,
                                   const std::string& variant) {
  if (method == "sobt") return method + "_" + variant;
  return method + "_" + strategy + "_" + variant;
}

/// Surface every semantic problem in the config without executing anything.
/// An empty result means the campaign can run as given.
inline std::vector<Diagnostic> validate_run_config(
    const RunConfig& cfg, const FunctionCatalog& catalog = FunctionCatalog::builtins()) {
  std::vector<Diagnostic> out;
  auto add = [&out](std::string code, std::string detail, std::string combo = "") {
    out.push_back({std::move(code), std::move(detail), std::move(combo)});
  };

  bool have_source = !cfg.manifest.empty() || cfg.synthetic.has_value();
  if (!have_source)
    add("missing_system", "config names neither a manifest nor a synthetic system");

  std::optional<StructuredSystem> sys;
  if (have_source) {
    try {
      sys = resolve_system(cfg, catalog);
    } catch (const Error& e) {
      add("bad_system", e.what());
    }
  }

  if (!(cfg.band_lo_hz > 0.0 && cfg.band_hi_hz > cfg.band_lo_hz))
    add("bad_band", "band must satisfy 0 < lo_hz < hi_hz");
  if (cfg.grid_points < 2) add("bad_band", "band needs at least 2 grid points");

  if (cfg.methods.empty()) add("empty_methods", "no methods requested");

  bool any_presampled = false;
  for (const MethodSpec& m : cfg.methods) {
    if (!detail::known_method(m.method)) {
      add("unknown_method", "unknown method '" + m.method + "'", m.method);
      continue;
    }
    if (m.method == "sobt") {
      if (m.variants.empty())
        add("unknown_variant", "sobt row lists no variants", m.method);
      for (const std::string& v : m.variants) {
        if (!detail::known_sobt_variant(v)) {
          add("unknown_variant", "unknown balancing variant '" + v + "'",
              combination_tag(m.method, "", v));
          continue;
        }
        if (sys) {
          if (auto reason = sobt_applicability(*sys))
            add(*reason, "system is outside the balancing applicability set",
                combination_tag(m.method, "", v));
        }
      }
      continue;
    }
    any_presampled = true;
    if (m.strategies.empty())
      add("unknown_strategy", m.method + " row lists no strategies", m.method);
    if (m.variants.empty())
      add("unknown_variant", m.method + " row lists no variants", m.method);
    for (const std::string& s : m.strategies) {
      if (!detail::known_strategy(s)) {
        add("unknown_strategy", "unknown strategy '" + s + "'", m.method + "_" + s);
        continue;
      }
      if (s == "soa" && sys && (sys->m != 1 || sys->p != 1))
        add("soa_requires_siso", "Arnoldi presampling needs one input and one output",
            m.method + "_" + s);
    }
    for (const std::string& v : m.variants)
      if (!detail::known_projection_variant(v))
        add("unknown_variant", "unknown projection variant '" + v + "'",
            m.method + "_" + v);
  }

  if (any_presampled && cfg.shift_count < 1)
    add("bad_shifts", "presampled methods need shifts.count >= 1");

  if (cfg.r_schedule.empty()) {
    add("bad_schedule", "r_schedule is empty");
  } else {
    for (Eigen::Index r : cfg.r_schedule)
      if (r < 1) add("bad_schedule", "r_schedule entries must be positive");
    if (sys) {
      Eigen::Index top = *std::max_element(cfg.r_schedule.begin(), cfg.r_schedule.end());
      if (top > sys->n)
        add("bad_schedule", "r_schedule exceeds the system order");
    }
  }

  if (!(cfg.morscore_eps > 0.0 && cfg.morscore_eps < 1.0))
    add("bad_morscore", "morscore eps must lie in (0, 1)");
  if (cfg.morscore_r_max < 1)
    add("bad_morscore", "morscore r_max must be at least 1");
  if (cfg.jobs < 1) add("bad_jobs", "jobs must be at least 1");

  return out;
}

}  // namespace somor
