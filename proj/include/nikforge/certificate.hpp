#pragma once

// Run records. A certificate is the complete, machine-checkable trace of one
// pipeline run: per-stage verdicts with the exact gate values that justify
// them, the lattice-side confirmations, and enough input data to recompute
// everything. Serialization is byte-deterministic: ordered fields, rationals
// as "num/den" strings, 2-space indent, trailing newline.

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nikforge/binary_form.hpp"
#include "nikforge/matrix.hpp"
#include "nikforge/multipoly.hpp"
#include "nikforge/rational.hpp"

namespace nikforge {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kMonomialOrder = "grlex";
inline constexpr const char* kPlueckerOrder =
    "p01 p02 p03 p04 p12 p13 p14 p23 p24 p34";
inline constexpr const char* kGeneratorName = "splitmix64";

inline std::string digest(const std::string& s) { return hex64(fnv1a64(s)); }

inline Json json_rat(const Rational& x) { return Json(rat_str(x)); }

inline Json json_form(const BinaryForm& f) {
  Json a = Json::array();
  for (int k = 0; k <= f.degree(); ++k) a.push_back(rat_str(f[k]));
  return a;
}

inline Json json_vec(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(rat_str(x));
  return a;
}

inline Json json_mat(const Mat& m) {
  Json a = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(rat_str(m(i, j)));
    a.push_back(std::move(row));
  }
  return a;
}

// terms in grlex order, each as [exponent string, coefficient string]
inline Json json_poly(const MultiPoly& f) {
  Json a = Json::array();
  for (const auto& [m, c] : f.terms()) {
    std::string key;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i) key += ' ';
      key += std::to_string(m[i]);
    }
    a.push_back(Json::array({key, rat_str(c)}));
  }
  return a;
}

inline std::string form_digest(const BinaryForm& f) {
  std::string s;
  for (int k = 0; k <= f.degree(); ++k) {
    s += rat_str(f[k]);
    s += ',';
  }
  return digest(s);
}

inline std::string poly_digest(const MultiPoly& f) {
  return digest(json_poly(f).dump());
}

struct StageRecord {
  std::string name;
  std::string paper_anchor;  // stable slug naming the claim the stage checks
  std::string inputs_digest;
  bool verdict = false;
  Json data = Json::object();
};

struct Certificate {
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::vector<StageRecord> stages;
  Json lattice = Json::object();
  int moduli_dimension = 0;
  bool verdict = false;

  Json to_json() const {
    Json j = Json::object();
    j["version"] = version;
    j["seed"] = seed;
    j["convention"] = {{"monomial_order", kMonomialOrder},
                       {"pluecker_order", kPlueckerOrder},
                       {"discriminant_norm", kDiscriminantConvention}};
    Json st = Json::array();
    for (const auto& r : stages) {
      Json s = Json::object();
      s["name"] = r.name;
      s["paper_anchor"] = r.paper_anchor;
      s["inputs_digest"] = r.inputs_digest;
      s["verdict"] = r.verdict;
      s["data"] = r.data;
      st.push_back(std::move(s));
    }
    j["stages"] = std::move(st);
    j["lattice"] = lattice;
    j["moduli_dimension"] = moduli_dimension;
    j["verdict"] = verdict;
    return j;
  }

  std::string serialize() const { return to_json().dump(2) + "\n"; }
};

}  // namespace nikforge
