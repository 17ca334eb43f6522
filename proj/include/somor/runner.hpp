// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// Batch campaign execution.  A campaign takes one system through a matrix
// of reduction methods and writes, per combination, an error curve CSV, a
// MORscore row, and an optional reduced-model export, plus one summary file
// carrying the config echo, versions, and per-combination status.  Failures
// and inapplicable combinations are recorded and the batch continues.
// Numeric outputs are deterministic for a fixed config and seed; wall-clock
// columns are zeroed unless timing is recorded.

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "somor/balance.hpp"
#include "somor/config.hpp"
#include "somor/error.hpp"
#include "somor/manifest.hpp"
#include "somor/metrics.hpp"
#include "somor/reduce.hpp"
#include "somor/select.hpp"
#include "somor/version.hpp"

namespace somor {

struct CombinationOutcome {
  std::string tag;
  std::string method;
  std::string strategy;  // empty for balancing combinations
  std::string variant;
  std::string status;  // ok | skipped | failed
  std::string reason;  // skip/failure cause, or the greedy stop reason
  ErrorCurve curve;
  double score = 0.0;
  double seconds = 0.0;
};

struct CampaignReport {
  std::string out_dir;
  std::vector<CombinationOutcome> combinations;
};

namespace detail {

class StopWatch {
 public:
  explicit StopWatch(bool enabled) : enabled_(enabled) { reset(); }
  void reset() {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }
  double seconds() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    require(out.good(), ErrorCode::IoFailure,
            "cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    require(out.good(), ErrorCode::IoFailure, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, ErrorCode::IoFailure, "cannot move '" + tmp.string() + "' into place");
}

inline std::string curve_csv(const ErrorCurve& curve) {
  std::string text = "r,eps,seconds\n";
  for (const ErrorSample& s : curve.samples) {
    text += std::to_string(static_cast<long long>(s.r));
    text += ',';
    text += format_double(s.eps);
    text += ',';
    text += format_double(s.seconds);
    text += '\n';
  }
  return text;
}

inline PresampleStrategy strategy_from_name(const std::string& s) {
  if (s == "standard") return PresampleStrategy::standard;
  if (s == "sp") return PresampleStrategy::sp;
  if (s == "soa") return PresampleStrategy::soa;
  fail(ErrorCode::BadConfig, "unknown strategy '" + s + "'");
}

/// Shared once-per-campaign inputs: the system, the reference sweep, the
/// full shift plan, per-(strategy, side) presample pools, and the Gramian
/// factors for balancing.  Everything is built lazily and cached.
struct CampaignState {
  const RunConfig& cfg;
  StructuredSystem sys;
  FrequencyGrid grid;
  Sweep fom;
  ShiftPlan pool_plan;

  std::map<std::string, PresampleBasis> presamples;
  std::unique_ptr<PartitionedGramianFactors> factors;

  explicit CampaignState(const RunConfig& config) : cfg(config) {}

  PresampleOptions presample_options(const std::string& strategy) const {
    PresampleOptions opts;
    opts.strategy = strategy_from_name(strategy);
    if (cfg.sp_order >= 0) opts.sp_order_case_c = cfg.sp_order;
    return opts;
  }

  const PresampleBasis& pooled(const std::string& strategy, BasisSide side) {
    std::string key = strategy + (side == BasisSide::input ? ":in" : ":out");
    auto it = presamples.find(key);
    if (it != presamples.end()) return it->second;
    PresampleBasis pre = presample(sys, pool_plan, side, presample_options(strategy));
    return presamples.emplace(key, std::move(pre)).first->second;
  }

  const PartitionedGramianFactors& gramians() {
    if (!factors)
      factors = std::make_unique<PartitionedGramianFactors>(
          gramian_factors(first_order_realize(sys)));
    return *factors;
  }
};

inline double rom_error(CampaignState& state, const ReducedModel& rom) {
  return linf_rel_error(state.fom, sweep(rom.sys, state.grid, state.cfg.jobs));
}

/// Interpolation at q equidistant shifts; the reduced order is q times the
/// per-shift block width (doubled by realification), so only matching
/// schedule entries are evaluable.
inline void run_equi(CampaignState& state, const std::string& strategy,
                     ProjectionVariant variant, CombinationOutcome& out) {
  const RunConfig& cfg = state.cfg;
  const bool real_form = variant_is_real(variant);
  const bool two_sided = variant_two_sided(variant);
  const bool output_side = variant == ProjectionVariant::osimagoutput ||
                           variant == ProjectionVariant::osrealoutput;

  // Per-shift width comes from the pooled presample of the same strategy.
  const PresampleBasis& probe =
      state.pooled(strategy, output_side ? BasisSide::output : BasisSide::input);
  require(!probe.blocks.empty(), ErrorCode::BadConfig, "presample produced no blocks");
  const Eigen::Index width = probe.blocks.front().second;
  const Eigen::Index unit = width * (real_form ? 2 : 1);

  std::string last_error;
  for (Eigen::Index r : cfg.r_schedule) {
    if (r % unit != 0) continue;
    Eigen::Index q = r / unit;
    if (q < 1) continue;
    StopWatch watch(cfg.record_timing);
    try {
      ShiftPlan sub = equi_shifts(cfg.band_lo_hz, cfg.band_hi_hz, q);
      PresampleOptions opts = state.presample_options(strategy);
      Matrix v;
      Matrix w;
      if (two_sided) {
        v = presample(state.sys, sub, BasisSide::input, opts).columns;
        w = presample(state.sys, sub, BasisSide::output, opts).columns;
        if (real_form) {
          v = realify(v);
          w = realify(w);
        }
      } else {
        BasisSide side = output_side ? BasisSide::output : BasisSide::input;
        v = presample(state.sys, sub, side, opts).columns;
        if (real_form) v = realify(v);
      }
      ReducedModel rom = project(state.sys, {v, w, variant});
      double eps = rom_error(state, rom);
      out.curve.add(rom.sys.n, eps, watch.seconds());
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (out.curve.samples.empty())
    fail(ErrorCode::EmptyCurve,
         last_error.empty() ? "no schedule entry matches the block width" : last_error);
}

/// Pool compression at each scheduled order: pivoted QR for avg, SVD for
/// minrel, over the realified pool for real variants.
inline void run_compress(CampaignState& state, const std::string& method,
                         const std::string& strategy, ProjectionVariant variant,
                         CombinationOutcome& out) {
  const RunConfig& cfg = state.cfg;
  const bool real_form = variant_is_real(variant);
  const bool two_sided = variant_two_sided(variant);
  const bool output_side = variant == ProjectionVariant::osimagoutput ||
                           variant == ProjectionVariant::osrealoutput;

  auto pool = [&](BasisSide side) -> PresampleBasis {
    PresampleBasis pre = state.pooled(strategy, side);
    return real_form ? realify_presample(pre) : pre;
  };
  auto compress = [&](const PresampleBasis& pre, Eigen::Index r) -> SelectionResult {
    return method == "avg" ? avg_compress(pre, r) : minrel_compress(pre, r);
  };

  PresampleBasis right =
      pool(output_side ? BasisSide::output : BasisSide::input);
  PresampleBasis left;
  if (two_sided) left = pool(BasisSide::output);

  std::string last_error;
  for (Eigen::Index r : cfg.r_schedule) {
    StopWatch watch(cfg.record_timing);
    try {
      SelectionResult sel = compress(right, r);
      Matrix w;
      std::vector<double> shifts_hz = sel.picked_hz;
      if (two_sided) w = compress(left, r).v;
      ReducedModel rom = project(state.sys, {sel.v, w, variant});
      rom.provenance.shifts_hz = std::move(shifts_hz);
      double eps = rom_error(state, rom);
      out.curve.add(rom.sys.n, eps, watch.seconds());
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (out.curve.samples.empty())
    fail(ErrorCode::EmptyCurve, last_error.empty() ? "empty schedule" : last_error);
}

/// One greedy run to the MORscore horizon; the per-iteration history is the
/// curve.  The loop's own cost cannot be attributed per row, so each row
/// carries the total.
inline void run_greedy(CampaignState& state, const std::string& strategy,
                       ProjectionVariant variant, double tol,
                       CombinationOutcome& out) {
  const RunConfig& cfg = state.cfg;
  const bool real_form = variant_is_real(variant);
  const bool two_sided = variant_two_sided(variant);
  const bool output_side = variant == ProjectionVariant::osimagoutput ||
                           variant == ProjectionVariant::osrealoutput;

  const PresampleBasis& right =
      state.pooled(strategy, output_side ? BasisSide::output : BasisSide::input);
  const PresampleBasis* left = nullptr;
  if (two_sided) left = &state.pooled(strategy, BasisSide::output);

  StopWatch watch(cfg.record_timing);
  std::vector<GreedyBlock> blocks = greedy_blocks(right, left, real_form);
  GreedyOptions opts;
  opts.r_target = std::min<Eigen::Index>(cfg.morscore_r_max, state.sys.n);
  opts.tol = tol;
  opts.jobs = cfg.jobs;
  SelectionResult sel = greedy_linf(state.sys, state.fom, blocks, opts);
  double total = watch.seconds();
  for (const ErrorSample& s : sel.history.samples) out.curve.add(s.r, s.eps, total);
  out.reason = sel.stop_reason;
}

inline void run_sobt(CampaignState& state, const std::string& variant,
                     CombinationOutcome& out) {
  const RunConfig& cfg = state.cfg;
  const PartitionedGramianFactors& factors = state.gramians();
  std::string last_error;
  for (Eigen::Index r : cfg.r_schedule) {
    StopWatch watch(cfg.record_timing);
    try {
      ReducedModel rom;
      if (variant == "input" || variant == "output") {
        LyapunovSide side = variant == "input" ? LyapunovSide::Controllability
                                               : LyapunovSide::Observability;
        ProjectionPair pair = dominant_onesided(factors, side, r);
        rom = project(state.sys, pair);
        rom.provenance.method = "sobt";
        rom.provenance.strategy = variant;
      } else {
        rom = sobt(state.sys, factors, sobt_variant_from_name(variant), r);
      }
      double eps = rom_error(state, rom);
      out.curve.add(rom.sys.n, eps, watch.seconds());
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (out.curve.samples.empty())
    fail(ErrorCode::EmptyCurve, last_error.empty() ? "empty schedule" : last_error);
}

inline ProjectionVariant projection_variant_from_name(const std::string& v) {
  if (v == "tsimag") return ProjectionVariant::tsimag;
  if (v == "tsreal") return ProjectionVariant::tsreal;
  if (v == "osimaginput") return ProjectionVariant::osimaginput;
  if (v == "osrealinput") return ProjectionVariant::osrealinput;
  if (v == "osimagoutput") return ProjectionVariant::osimagoutput;
  if (v == "osrealoutput") return ProjectionVariant::osrealoutput;
  fail(ErrorCode::BadConfig, "unknown projection variant '" + v + "'");
}

/// Re-run the best order of a finished combination and export the model.
inline void export_best_model(CampaignState& state, const CombinationOutcome& out,
                              const std::filesystem::path& dir) {
  if (out.curve.samples.empty()) return;
  Eigen::Index best_r = 0;
  double best_eps = std::numeric_limits<double>::infinity();
  for (const ErrorSample& s : out.curve.samples)
    if (s.eps < best_eps) {
      best_eps = s.eps;
      best_r = s.r;
    }

  ReducedModel rom;
  if (out.method == "sobt") {
    if (out.variant == "input" || out.variant == "output") {
      LyapunovSide side = out.variant == "input" ? LyapunovSide::Controllability
                                                 : LyapunovSide::Observability;
      rom = project(state.sys, dominant_onesided(state.gramians(), side, best_r));
      rom.provenance.method = "sobt";
      rom.provenance.strategy = out.variant;
    } else {
      rom = sobt(state.sys, state.gramians(), sobt_variant_from_name(out.variant),
                 best_r);
    }
  } else {
    ProjectionVariant variant = projection_variant_from_name(out.variant);
    const bool real_form = variant_is_real(variant);
    const bool two_sided = variant_two_sided(variant);
    const bool output_side = variant == ProjectionVariant::osimagoutput ||
                             variant == ProjectionVariant::osrealoutput;
    PresampleBasis right = state.pooled(
        out.strategy, output_side ? BasisSide::output : BasisSide::input);
    if (real_form) right = realify_presample(right);
    Matrix v;
    Matrix w;
    if (out.method == "greedy") {
      const PresampleBasis& plain_right = state.pooled(
          out.strategy, output_side ? BasisSide::output : BasisSide::input);
      const PresampleBasis* left =
          two_sided ? &state.pooled(out.strategy, BasisSide::output) : nullptr;
      GreedyOptions opts;
      opts.r_target = best_r;
      opts.jobs = state.cfg.jobs;
      SelectionResult sel = greedy_linf(state.sys, state.fom,
                                        greedy_blocks(plain_right, left, real_form),
                                        opts);
      v = sel.v;
      w = sel.w;
    } else if (out.method == "equi") {
      Eigen::Index width = state
                               .pooled(out.strategy,
                                       output_side ? BasisSide::output : BasisSide::input)
                               .blocks.front()
                               .second;
      Eigen::Index q = best_r / (width * (real_form ? 2 : 1));
      ShiftPlan sub = equi_shifts(state.cfg.band_lo_hz, state.cfg.band_hi_hz, q);
      PresampleOptions opts = state.presample_options(out.strategy);
      BasisSide side = output_side ? BasisSide::output : BasisSide::input;
      v = presample(state.sys, sub, side, opts).columns;
      if (two_sided) w = presample(state.sys, sub, BasisSide::output, opts).columns;
      if (real_form) {
        v = realify(v);
        if (w.size() > 0) w = realify(w);
      }
    } else {
      auto compress = [&](const PresampleBasis& pre) {
        return out.method == "avg" ? avg_compress(pre, best_r)
                                   : minrel_compress(pre, best_r);
      };
      SelectionResult sel = compress(right);
      v = sel.v;
      if (two_sided) {
        PresampleBasis left = state.pooled(out.strategy, BasisSide::output);
        if (real_form) left = realify_presample(left);
        w = compress(left).v;
      }
    }
    rom = project(state.sys, {v, w, variant});
    rom.provenance.method = out.method;
    rom.provenance.strategy = out.strategy;
  }
  export_reduced_model((dir / ("rom_" + out.tag + ".json")).string(), rom);
}

}  // namespace detail

/// Execute the campaign described by the config.  Results land in
/// cfg.out_dir: one `curve_<tag>.csv` per combination, `scores.csv`, the
/// `summary` file, and optional `rom_<tag>.json` exports.
inline CampaignReport run_campaign(const RunConfig& cfg) {
  require(!cfg.r_schedule.empty(), ErrorCode::BadConfig, "run: empty r_schedule");
  require(cfg.grid_points >= 2, ErrorCode::BadConfig, "run: grid needs 2+ points");
  require(cfg.morscore_r_max >= 1, ErrorCode::BadConfig, "run: morscore r_max < 1");

  detail::CampaignState state(cfg);
  state.sys = resolve_system(cfg);
  state.grid = FrequencyGrid::linspace_hz(cfg.band_lo_hz, cfg.band_hi_hz,
                                          cfg.grid_points);
  state.fom = sweep(state.sys, state.grid, cfg.jobs);

  bool any_presampled = false;
  for (const MethodSpec& m : cfg.methods)
    if (m.method != "sobt") any_presampled = true;
  if (any_presampled) {
    require(cfg.shift_count >= 1, ErrorCode::BadConfig,
            "run: presampled methods need shifts.count >= 1");
    state.pool_plan = equi_shifts(cfg.band_lo_hz, cfg.band_hi_hz, cfg.shift_count,
                                  cfg.extra_shifts_hz);
  }

  std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);

  CampaignReport report;
  report.out_dir = out_dir.string();

  auto finish = [&](CombinationOutcome& out) {
    if (!out.curve.samples.empty()) {
      out.status = "ok";
      ErrorCurve scored;
      for (const ErrorSample& s : out.curve.samples)
        if (s.r <= cfg.morscore_r_max) scored.samples.push_back(s);
      if (!scored.samples.empty())
        out.score = morscore(scored, cfg.morscore_eps, cfg.morscore_r_max).score;
      for (const ErrorSample& s : out.curve.samples) out.seconds += s.seconds;
    }
    detail::atomic_write(out_dir / ("curve_" + out.tag + ".csv"),
                         detail::curve_csv(out.curve));
    if (cfg.export_models && out.status == "ok") {
      try {
        detail::export_best_model(state, out, out_dir);
      } catch (const Error& e) {
        out.reason = std::string("export failed: ") + e.what();
      }
    }
    report.combinations.push_back(std::move(out));
  };

  for (const MethodSpec& m : cfg.methods) {
    if (m.method == "sobt") {
      for (const std::string& variant : m.variants) {
        CombinationOutcome out;
        out.tag = combination_tag(m.method, "", variant);
        out.method = m.method;
        out.variant = variant;
        if (auto reason = sobt_applicability(state.sys)) {
          out.status = "skipped";
          out.reason = *reason;
          finish(out);
          continue;
        }
        try {
          detail::run_sobt(state, variant, out);
        } catch (const Error& e) {
          out.status = "failed";
          out.reason = e.what();
        }
        finish(out);
      }
      continue;
    }
    for (const std::string& strategy : m.strategies) {
      for (const std::string& variant : m.variants) {
        CombinationOutcome out;
        out.tag = combination_tag(m.method, strategy, variant);
        out.method = m.method;
        out.strategy = strategy;
        out.variant = variant;
        if (strategy == "soa" && (state.sys.m != 1 || state.sys.p != 1)) {
          out.status = "skipped";
          out.reason = "soa_requires_siso";
          finish(out);
          continue;
        }
        try {
          ProjectionVariant pv = detail::projection_variant_from_name(variant);
          if (m.method == "equi") {
            detail::run_equi(state, strategy, pv, out);
          } else if (m.method == "greedy") {
            detail::run_greedy(state, strategy, pv, m.greedy_tol, out);
          } else {
            detail::run_compress(state, m.method, strategy, pv, out);
          }
        } catch (const Error& e) {
          out.status = "failed";
          out.reason = e.what();
          out.curve = ErrorCurve{};
        }
        finish(out);
      }
    }
  }

  std::string scores = "tag,morscore\n";
  for (const CombinationOutcome& out : report.combinations)
    if (out.status == "ok")
      scores += out.tag + "," + detail::format_double(out.score) + "\n";
  detail::atomic_write(out_dir / "scores.csv", scores);

  nlohmann::json summary;
  summary["config"] = cfg.echo.is_null() ? nlohmann::json::object() : cfg.echo;
  summary["seed"] = cfg.seed;
  summary["versions"] = {{"somor", kVersion}};
  nlohmann::json rows = nlohmann::json::array();
  for (const CombinationOutcome& out : report.combinations) {
    nlohmann::json row;
    row["tag"] = out.tag;
    row["status"] = out.status;
    row["reason"] = out.reason;
    row["rows"] = static_cast<long long>(out.curve.samples.size());
    row["morscore"] = out.score;
    row["seconds"] = cfg.record_timing ? out.seconds : 0.0;
    rows.push_back(std::move(row));
  }
  summary["combinations"] = std::move(rows);
  detail::atomic_write(out_dir / "summary", summary.dump(2) + "\n");

  return report;
}

}  // namespace somor
