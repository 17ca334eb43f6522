// Copyright (c) 2026 The somor authors
// SPDX-License-Identifier: Apache-2.0
//
// System and reduced-model manifests.  A manifest is one JSON file naming
// the case tag, dimensions, and per-term coefficient tags, with each matrix
// stored beside it as a Matrix Market file.  Coefficient functions are
// referenced by catalog id, so a round trip through disk reproduces the
// exact evaluator.  Reduced models use the same layout plus a provenance
// block.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "somor/coefficient.hpp"
#include "somor/error.hpp"
#include "somor/mmio.hpp"
#include "somor/reduce.hpp"
#include "somor/system.hpp"

namespace somor {

inline const char* coeff_kind_name(CoeffKind k) {
  switch (k) {
    case CoeffKind::Constant: return "constant";
    case CoeffKind::Linear: return "linear";
    case CoeffKind::Quadratic: return "quadratic";
    case CoeffKind::InverseS: return "inverse_s";
    case CoeffKind::Function: return "function";
  }
  return "?";
}

inline nlohmann::json coefficient_to_json(const Coefficient& c) {
  nlohmann::json j;
  j["kind"] = coeff_kind_name(c.kind());
  j["scale"] = {c.scale().real(), c.scale().imag()};
  if (c.kind() == CoeffKind::Function) j["id"] = c.fn()->id;
  return j;
}

inline Coefficient coefficient_from_json(const nlohmann::json& j,
                                         const FunctionCatalog& catalog) {
  std::string kind = j.at("kind").get<std::string>();
  auto scale_arr = j.at("scale");
  require(scale_arr.is_array() && scale_arr.size() == 2, ErrorCode::IoFailure,
          "coefficient scale must be a [real, imag] pair");
  Complex scale(scale_arr[0].get<double>(), scale_arr[1].get<double>());
  if (kind == "constant") return Coefficient::constant(scale);
  if (kind == "linear") return Coefficient::linear(scale);
  if (kind == "quadratic") return Coefficient::quadratic(scale);
  if (kind == "inverse_s") return Coefficient::inverse_s(scale);
  if (kind == "function")
    return Coefficient::function(catalog.lookup(j.at("id").get<std::string>()), scale);
  fail(ErrorCode::IoFailure, "unknown coefficient kind '" + kind + "'");
}

namespace detail {

inline std::string manifest_stem(const std::filesystem::path& manifest_path) {
  return manifest_path.stem().string();
}

inline nlohmann::json terms_to_json(const std::vector<AffineTerm>& terms,
                                    const std::filesystem::path& dir,
                                    const std::string& stem, const char* group) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    std::string file = stem + "." + group + std::to_string(i) + ".mtx";
    write_matrix_market((dir / file).string(), terms[i].matrix);
    nlohmann::json entry;
    entry["coefficient"] = coefficient_to_json(terms[i].coeff);
    entry["matrix"] = file;
    arr.push_back(entry);
  }
  return arr;
}

inline std::vector<AffineTerm> terms_from_json(const nlohmann::json& arr,
                                               const std::filesystem::path& dir,
                                               const FunctionCatalog& catalog) {
  require(arr.is_array(), ErrorCode::IoFailure, "term group must be an array");
  std::vector<AffineTerm> terms;
  for (const nlohmann::json& entry : arr) {
    AffineTerm t{coefficient_from_json(entry.at("coefficient"), catalog),
                 read_matrix_market((dir / entry.at("matrix").get<std::string>()).string())};
    terms.push_back(std::move(t));
  }
  return terms;
}

inline nlohmann::json system_to_json(const StructuredSystem& sys,
                                     const std::filesystem::path& manifest_path) {
  validate_dimensions(sys);
  std::filesystem::path dir = manifest_path.parent_path();
  if (dir.empty()) dir = ".";
  std::string stem = manifest_stem(manifest_path);

  nlohmann::json j;
  j["format"] = "somor-system";
  j["version"] = 1;
  j["case"] = name(sys.case_tag);
  j["n"] = static_cast<long long>(sys.n);
  j["m"] = static_cast<long long>(sys.m);
  j["p"] = static_cast<long long>(sys.p);
  j["regular_point"] = {sys.regular_point.real(), sys.regular_point.imag()};
  nlohmann::json terms;
  terms["mass"] = terms_to_json(sys.mass_terms, dir, stem, "mass");
  terms["damping"] = terms_to_json(sys.damping_terms, dir, stem, "damping");
  terms["stiffness"] = terms_to_json(sys.stiffness_terms, dir, stem, "stiffness");
  terms["nonlinear"] = terms_to_json(sys.nonlinear_terms, dir, stem, "nonlinear");
  terms["input"] = terms_to_json(sys.input_terms, dir, stem, "input");
  j["terms"] = std::move(terms);
  std::string output_file = stem + ".output.mtx";
  write_matrix_market((dir / output_file).string(), sys.output);
  j["output"] = output_file;
  return j;
}

inline void write_manifest_json(const std::filesystem::path& manifest_path,
                                const nlohmann::json& j) {
  std::ofstream out(manifest_path);
  require(out.good(), ErrorCode::IoFailure,
          "cannot open '" + manifest_path.string() + "' for writing");
  out << j.dump(2) << '\n';
  out.flush();
  require(out.good(), ErrorCode::IoFailure,
          "write to '" + manifest_path.string() + "' failed");
}

inline nlohmann::json read_manifest_json(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  require(in.good(), ErrorCode::IoFailure,
          "cannot open '" + manifest_path.string() + "' for reading");
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  require(!j.is_discarded(), ErrorCode::IoFailure,
          "'" + manifest_path.string() + "' is not valid JSON");
  require(j.is_object() && j.value("format", "") == "somor-system", ErrorCode::IoFailure,
          "'" + manifest_path.string() + "' is not a system manifest");
  return j;
}

inline StructuredSystem system_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& manifest_path,
                                         const FunctionCatalog& catalog) {
  std::filesystem::path dir = manifest_path.parent_path();
  if (dir.empty()) dir = ".";
  StructuredSystem sys;
  std::string tag = j.at("case").get<std::string>();
  if (tag == "A") sys.case_tag = CaseTag::A;
  else if (tag == "B") sys.case_tag = CaseTag::B;
  else if (tag == "C") sys.case_tag = CaseTag::C;
  else fail(ErrorCode::IoFailure, "unknown case tag '" + tag + "'");
  sys.n = j.at("n").get<long long>();
  sys.m = j.at("m").get<long long>();
  sys.p = j.at("p").get<long long>();
  auto rp = j.at("regular_point");
  require(rp.is_array() && rp.size() == 2, ErrorCode::IoFailure,
          "regular_point must be a [real, imag] pair");
  sys.regular_point = Complex(rp[0].get<double>(), rp[1].get<double>());
  const nlohmann::json& terms = j.at("terms");
  sys.mass_terms = terms_from_json(terms.at("mass"), dir, catalog);
  sys.damping_terms = terms_from_json(terms.at("damping"), dir, catalog);
  sys.stiffness_terms = terms_from_json(terms.at("stiffness"), dir, catalog);
  sys.nonlinear_terms = terms_from_json(terms.at("nonlinear"), dir, catalog);
  sys.input_terms = terms_from_json(terms.at("input"), dir, catalog);
  sys.output = read_matrix_market((dir / j.at("output").get<std::string>()).string());
  validate_dimensions(sys);
  return sys;
}

}  // namespace detail

/// Write a system as `<path>` (JSON) plus one Matrix Market file per term
/// beside it, named `<stem>.<group><index>.mtx`.
inline void save_system(const std::string& manifest_path, const StructuredSystem& sys) {
  try {
    detail::write_manifest_json(manifest_path, detail::system_to_json(sys, manifest_path));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoFailure, std::string("manifest write: ") + e.what());
  }
}

/// Read a system manifest; matrix paths resolve relative to the manifest.
inline StructuredSystem load_system(
    const std::string& manifest_path,
    const FunctionCatalog& catalog = FunctionCatalog::builtins()) {
  try {
    return detail::system_from_json(detail::read_manifest_json(manifest_path),
                                    manifest_path, catalog);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoFailure, "'" + manifest_path + "': " + e.what());
  }
}

/// Reduced models use the system layout plus a provenance block.
inline void export_reduced_model(const std::string& manifest_path,
                                 const ReducedModel& rom) {
  try {
    nlohmann::json j = detail::system_to_json(rom.sys, manifest_path);
    nlohmann::json prov;
    prov["method"] = rom.provenance.method;
    prov["strategy"] = rom.provenance.strategy;
    prov["variant"] = rom.provenance.variant;
    prov["shifts_hz"] = rom.provenance.shifts_hz;
    prov["effective_r"] = static_cast<long long>(rom.provenance.effective_r);
    j["provenance"] = std::move(prov);
    detail::write_manifest_json(manifest_path, j);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoFailure, std::string("manifest write: ") + e.what());
  }
}

inline ReducedModel load_reduced_model(
    const std::string& manifest_path,
    const FunctionCatalog& catalog = FunctionCatalog::builtins()) {
  try {
    nlohmann::json j = detail::read_manifest_json(manifest_path);
    require(j.contains("provenance"), ErrorCode::IoFailure,
            "'" + manifest_path + "' has no provenance block");
    ReducedModel rom;
    rom.sys = detail::system_from_json(j, manifest_path, catalog);
    const nlohmann::json& prov = j.at("provenance");
    rom.provenance.method = prov.at("method").get<std::string>();
    rom.provenance.strategy = prov.at("strategy").get<std::string>();
    rom.provenance.variant = prov.at("variant").get<std::string>();
    rom.provenance.shifts_hz = prov.at("shifts_hz").get<std::vector<double>>();
    rom.provenance.effective_r = prov.at("effective_r").get<long long>();
    return rom;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::IoFailure, "'" + manifest_path + "': " + e.what());
  }
}

}  // namespace somor
