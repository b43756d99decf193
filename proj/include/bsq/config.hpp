#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bsq/bs.hpp"
#include "bsq/dynsys.hpp"
#include "bsq/orbit.hpp"

namespace bsq {

/// Validated run configuration. Every omitted field has a default, except
/// system.kind and h.
struct RunConfig {
  std::string kind;
  BuiltinParams params;
  BSConfig bs;
  std::optional<double> seed_energy;  // default: bs.e_center
  std::optional<OrbitGuess> orbit_guess;
  double e_min = 0.0;                 // default: e_center - 4 eps0
  double e_max = 0.0;                 // default: e_center + 4 eps0
  int n_energies = 9;
  double flow_tol = 1e-13;
  double orbit_tol = 1e-10;
  double quadrature_tol = 1e-9;
  double class_tol = 1e-6;
  int index_samples = 64;
  int nonres_k_max = 10;
  double nonres_tol = 1e-9;
  int zeta_degree = -1;               // default: floor(h^-delta)
  std::string format = "csv";
  std::string out_path;

  double seed() const { return seed_energy.value_or(bs.e_center); }
  int zeta_n() const;
  HamiltonianSystem system() const;
  OrbitGuess guess() const;
  /// Normalised echo of every field, defaults filled in.
  nlohmann::json echo() const;
};

/// Throws ConfigError whose message starts with the JSON pointer of the
/// offending field, e.g. "/h: required field missing".
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace bsq
