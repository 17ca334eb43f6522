// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "somor/manifest.hpp"
#include "somor/runner.hpp"

using somor_test::HasCode;
using somor::ErrorCode;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::path("runner_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

somor::RunConfig base_config(const std::string& out_dir) {
  somor::RunConfig cfg;
  somor::SyntheticModelSpec spec;
  spec.kind = "chainA-rayleigh";
  spec.n = 16;
  spec.seed = 5;
  spec.tva_count = 0;
  spec.alpha = 0.02;
  spec.beta = 2e-4;
  spec.band_lo_hz = 40.0;
  spec.band_hi_hz = 120.0;
  cfg.synthetic = spec;
  cfg.band_lo_hz = 40.0;
  cfg.band_hi_hz = 120.0;
  cfg.grid_points = 40;
  cfg.shift_count = 5;
  cfg.r_schedule = {2, 3, 4, 6};
  cfg.morscore_eps = 1e-8;
  cfg.morscore_r_max = 6;
  cfg.out_dir = out_dir;
  cfg.seed = 5;
  cfg.record_timing = false;
  return cfg;
}

struct CsvRow {
  long long r;
  double eps;
  double seconds;
};

std::vector<CsvRow> parse_curve(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(static_cast<bool>(std::getline(in, line)));
  REQUIRE(line == "r,eps,seconds");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    CsvRow row{};
    REQUIRE(std::sscanf(line.c_str(), "%lld,%lf,%lf", &row.r, &row.eps,
                        &row.seconds) == 3);
    rows.push_back(row);
  }
  return rows;
}

const somor::CombinationOutcome& find_combo(const somor::CampaignReport& report,
                                            const std::string& tag) {
  for (const somor::CombinationOutcome& c : report.combinations)
    if (c.tag == tag) return c;
  FAIL("combination '" + tag + "' not found");
  return report.combinations.front();
}

}  // namespace

TEST_CASE("a full campaign writes curves, scores, and a summary", "[runner]") {
  fs::path dir = scratch_dir("full");
  somor::RunConfig cfg = base_config(dir.string());
  cfg.methods.push_back({"equi", {"standard"}, {"tsimag", "tsreal"}, 0.0});
  cfg.methods.push_back({"avg", {"standard"}, {"osimaginput"}, 0.0});
  cfg.methods.push_back({"minrel", {"sp"}, {"tsimag"}, 0.0});
  cfg.methods.push_back({"greedy", {"sp"}, {"tsimag"}, 0.0});
  cfg.methods.push_back({"sobt", {}, {"v", "so", "input"}, 0.0});

  somor::CampaignReport report = somor::run_campaign(cfg);
  REQUIRE(report.combinations.size() == 8);
  for (const somor::CombinationOutcome& c : report.combinations) {
    INFO(c.tag << ": " << c.status << " " << c.reason);
    CHECK(c.status == "ok");
    CHECK_FALSE(c.curve.samples.empty());
    CHECK(fs::exists(dir / ("curve_" + c.tag + ".csv")));
  }

  SECTION("curve files carry the recorded samples") {
    const somor::CombinationOutcome& avg = find_combo(report, "avg_standard_osimaginput");
    std::vector<CsvRow> rows = parse_curve(dir / "curve_avg_standard_osimaginput.csv");
    REQUIRE(rows.size() == avg.curve.samples.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].r == avg.curve.samples[i].r);
      CHECK(rows[i].eps == avg.curve.samples[i].eps);
      CHECK(rows[i].seconds == 0.0);
      CHECK(std::isfinite(rows[i].eps));
      CHECK(rows[i].eps > 0.0);
    }
    // Complex interpolation evaluates every scheduled order: one shift per
    // basis column.
    const somor::CombinationOutcome& ts = find_combo(report, "equi_standard_tsimag");
    REQUIRE(ts.curve.samples.size() == 4);
    CHECK(ts.curve.samples.back().r == 6);
  }

  SECTION("real variants only evaluate realifiable orders") {
    const somor::CombinationOutcome& real_equi = find_combo(report, "equi_standard_tsreal");
    for (const somor::ErrorSample& s : real_equi.curve.samples) CHECK(s.r % 2 == 0);
    const somor::CombinationOutcome& cplx_equi = find_combo(report, "equi_standard_tsimag");
    CHECK(cplx_equi.curve.samples.size() >= real_equi.curve.samples.size());
  }

  SECTION("greedy reports its stop reason and history") {
    const somor::CombinationOutcome& greedy = find_combo(report, "greedy_sp_tsimag");
    CHECK((greedy.reason == "tol" || greedy.reason == "r_target"));
    CHECK(greedy.curve.samples.front().r >= 1);
  }

  SECTION("scores are listed for every successful combination") {
    std::string scores = read_text(dir / "scores.csv");
    CHECK(scores.rfind("tag,morscore\n", 0) == 0);
    for (const somor::CombinationOutcome& c : report.combinations) {
      CHECK(scores.find(c.tag + ",") != std::string::npos);
      CHECK(c.score >= 0.0);
      CHECK(c.score < 1.0);
    }
  }

  SECTION("the summary echoes status per combination") {
    nlohmann::json summary = nlohmann::json::parse(read_text(dir / "summary"));
    CHECK(summary.at("versions").at("somor") == somor::kVersion);
    CHECK(summary.at("seed") == 5);
    REQUIRE(summary.at("combinations").size() == 8);
    for (const nlohmann::json& row : summary.at("combinations")) {
      CHECK(row.at("status") == "ok");
      CHECK(row.at("seconds") == 0.0);
      CHECK(row.at("rows").get<long long>() > 0);
    }
  }
}

TEST_CASE("campaigns are bit-reproducible when timing is off", "[runner]") {
  fs::path dir1 = scratch_dir("repro1");
  fs::path dir2 = scratch_dir("repro2");
  auto make = [&](const std::string& out) {
    somor::RunConfig cfg = base_config(out);
    cfg.methods.push_back({"equi", {"standard"}, {"tsimag"}, 0.0});
    cfg.methods.push_back({"avg", {"sp"}, {"tsreal"}, 0.0});
    cfg.methods.push_back({"sobt", {}, {"vpm"}, 0.0});
    return cfg;
  };
  somor::run_campaign(make(dir1.string()));
  somor::run_campaign(make(dir2.string()));

  for (const std::string& name :
       {std::string("curve_equi_standard_tsimag.csv"), std::string("curve_avg_sp_tsreal.csv"),
        std::string("curve_sobt_vpm.csv"), std::string("scores.csv"),
        std::string("summary")}) {
    INFO(name);
    std::string a = read_text(dir1 / name);
    CHECK_FALSE(a.empty());
    CHECK(a == read_text(dir2 / name));
  }
}

TEST_CASE("inapplicable balancing combinations are skipped, not fatal", "[runner]") {
  fs::path dir = scratch_dir("skip");
  somor::RunConfig cfg = base_config(dir.string());
  cfg.synthetic->kind = "chainC";
  cfg.methods.push_back({"avg", {"sp"}, {"tsimag"}, 0.0});
  cfg.methods.push_back({"sobt", {}, {"v", "so"}, 0.0});

  somor::CampaignReport report = somor::run_campaign(cfg);
  REQUIRE(report.combinations.size() == 3);
  CHECK(find_combo(report, "avg_sp_tsimag").status == "ok");
  for (const std::string& tag : {std::string("sobt_v"), std::string("sobt_so")}) {
    const somor::CombinationOutcome& c = find_combo(report, tag);
    CHECK(c.status == "skipped");
    CHECK(c.reason == "sobt_requires_case_a");
    CHECK(parse_curve(dir / ("curve_" + tag + ".csv")).empty());
  }

  nlohmann::json summary = nlohmann::json::parse(read_text(dir / "summary"));
  int skipped = 0;
  for (const nlohmann::json& row : summary.at("combinations"))
    if (row.at("status") == "skipped") ++skipped;
  CHECK(skipped == 2);
}

TEST_CASE("per-combination failures do not abort the batch", "[runner]") {
  fs::path dir = scratch_dir("failures");
  somor::RunConfig cfg = base_config(dir.string());
  cfg.shift_count = 2;         // presample pool of two columns
  cfg.r_schedule = {8};        // beyond the pool rank for compression
  cfg.morscore_r_max = 8;
  cfg.methods.push_back({"avg", {"standard"}, {"osimaginput"}, 0.0});
  cfg.methods.push_back({"sobt", {}, {"v"}, 0.0});

  somor::CampaignReport report = somor::run_campaign(cfg);
  REQUIRE(report.combinations.size() == 2);
  const somor::CombinationOutcome& failed = find_combo(report, "avg_standard_osimaginput");
  CHECK(failed.status == "failed");
  CHECK_FALSE(failed.reason.empty());
  CHECK(find_combo(report, "sobt_v").status == "ok");
}

TEST_CASE("model export writes a loadable reduced model", "[runner]") {
  fs::path dir = scratch_dir("export");
  somor::RunConfig cfg = base_config(dir.string());
  cfg.export_models = true;
  cfg.methods.push_back({"avg", {"standard"}, {"osimaginput"}, 0.0});
  cfg.methods.push_back({"sobt", {}, {"v"}, 0.0});

  somor::CampaignReport report = somor::run_campaign(cfg);
  for (const somor::CombinationOutcome& c : report.combinations) {
    INFO(c.tag << ": " << c.status << " " << c.reason);
    REQUIRE(c.status == "ok");
    fs::path rom_path = dir / ("rom_" + c.tag + ".json");
    REQUIRE(fs::exists(rom_path));
    somor::ReducedModel rom = somor::load_reduced_model(rom_path.string());
    CHECK(rom.provenance.method == c.method);
    if (c.method == "sobt")
      CHECK(rom.provenance.strategy == c.variant);
    else
      CHECK(rom.provenance.variant == c.variant);
    CHECK(rom.sys.n >= 1);
    CHECK(rom.sys.n <= 6);
  }
}

TEST_CASE("campaign rejects malformed requests up front", "[runner]") {
  somor::RunConfig cfg = base_config("runner_scratch/reject");
  cfg.methods.push_back({"equi", {"standard"}, {"tsimag"}, 0.0});

  SECTION("empty schedule") {
    cfg.r_schedule.clear();
    CHECK_THROWS_MATCHES(somor::run_campaign(cfg), somor::Error,
                         HasCode(ErrorCode::BadConfig));
  }

  SECTION("missing shifts for presampled methods") {
    cfg.shift_count = 0;
    CHECK_THROWS_MATCHES(somor::run_campaign(cfg), somor::Error,
                         HasCode(ErrorCode::BadConfig));
  }

  SECTION("degenerate grid") {
    cfg.grid_points = 1;
    CHECK_THROWS_MATCHES(somor::run_campaign(cfg), somor::Error,
                         HasCode(ErrorCode::BadConfig));
  }
}
