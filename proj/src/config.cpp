#include "bsq/config.hpp"

#include <cmath>
#include <fstream>

#include "bsq/errors.hpp"

namespace bsq {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

const json* member(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& key, const std::string& path,
                  std::optional<double> def) {
  const json* v = member(obj, key);
  if (!v) {
    if (!def) fail(path + "/" + key, "required field missing");
    return *def;
  }
  if (!v->is_number()) fail(path + "/" + key, "expected a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) fail(path + "/" + key, "must be finite");
  return x;
}

int get_int(const json& obj, const std::string& key, const std::string& path, int def) {
  const json* v = member(obj, key);
  if (!v) return def;
  if (!v->is_number_integer()) fail(path + "/" + key, "expected an integer");
  return v->get<int>();
}

const json& get_object(const json& obj, const std::string& key, const std::string& path,
                       const json& empty) {
  const json* v = member(obj, key);
  if (!v) return empty;
  if (!v->is_object()) fail(path + "/" + key, "expected an object");
  return *v;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail(path + "/" + it.key(), "unknown field");
  }
}

}  // namespace

int RunConfig::zeta_n() const {
  if (zeta_degree >= 0) return zeta_degree;
  return static_cast<int>(std::floor(std::pow(bs.h, -bs.delta) + 1e-12));
}

HamiltonianSystem RunConfig::system() const { return make_builtin(kind, params); }

OrbitGuess RunConfig::guess() const {
  if (orbit_guess) return *orbit_guess;
  return default_orbit_guess(system(), seed());
}

json RunConfig::echo() const {
  json sys = {{"kind", kind}};
  json params_j = json::object();
  if (kind == "model") {
    json cs = json::array();
    for (const cplx& c : params.coeffs) cs.push_back({c.real(), c.imag()});
    params_j["coeffs"] = cs;
  } else if (kind == "coulomb_stark") {
    params_j["a"] = params.a;
    params_j["dim"] = params.dim;
  }
  sys["params"] = params_j;
  json j = {
      {"system", sys},
      {"h", bs.h},
      {"delta", bs.delta},
      {"eps0", bs.eps0},
      {"k_cap_const", bs.k_cap_const},
      {"e_center", bs.e_center},
      {"seed_energy", seed()},
      {"grid", {{"e_min", e_min}, {"e_max", e_max}, {"n_energies", n_energies}}},
      {"tolerances",
       {{"flow", flow_tol},
        {"orbit", orbit_tol},
        {"newton", bs.newton_tol},
        {"quadrature", quadrature_tol},
        {"elliptic", class_tol}}},
      {"index", {{"n_samples", index_samples}}},
      {"nonresonance", {{"k_max", nonres_k_max}, {"tol", nonres_tol}}},
      {"zeta", {{"n_degree", zeta_n()}}},
      {"output", {{"format", format}, {"path", out_path}}},
  };
  if (orbit_guess) {
    const Vec z = orbit_guess->state.packed();
    j["orbit_guess"] = {{"state", std::vector<double>(z.data(), z.data() + z.size())},
                        {"period", orbit_guess->period}};
  }
  return j;
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) fail("", "configuration must be a JSON object");
  reject_unknown(j, "", {"system", "h", "delta", "eps0", "k_cap_const", "e_center",
                         "seed_energy", "orbit_guess", "grid", "tolerances", "index",
                         "output", "nonresonance", "zeta"});
  const json empty = json::object();
  RunConfig c;

  const json* sys = member(j, "system");
  if (!sys) fail("/system", "required field missing");
  if (!sys->is_object()) fail("/system", "expected an object");
  reject_unknown(*sys, "/system", {"kind", "params"});
  const json* kind = member(*sys, "kind");
  if (!kind) fail("/system/kind", "required field missing");
  if (!kind->is_string()) fail("/system/kind", "expected a string");
  c.kind = kind->get<std::string>();
  if (c.kind != "model" && c.kind != "hyperboloid" && c.kind != "coulomb_stark")
    fail("/system/kind", "unknown system kind '" + c.kind + "'");
  const json& params = get_object(*sys, "params", "/system", empty);
  reject_unknown(params, "/system/params", {"coeffs", "a", "dim"});
  if (c.kind == "model") {
    const json* cs = member(params, "coeffs");
    if (!cs) fail("/system/params/coeffs", "required field missing");
    if (!cs->is_array() || cs->empty()) fail("/system/params/coeffs", "expected a non-empty array");
    for (std::size_t i = 0; i < cs->size(); ++i) {
      const json& e = (*cs)[i];
      const std::string p = "/system/params/coeffs/" + std::to_string(i);
      if (e.is_number()) {
        c.params.coeffs.emplace_back(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        c.params.coeffs.emplace_back(e[0].get<double>(), e[1].get<double>());
      } else {
        fail(p, "expected a number or a [re, im] pair");
      }
    }
  }
  c.params.a = get_number(params, "a", "/system/params", 1.0);
  c.params.dim = get_int(params, "dim", "/system/params", 2);

  c.bs.h = get_number(j, "h", "", std::nullopt);
  c.bs.delta = get_number(j, "delta", "", 0.5);
  c.bs.eps0 = get_number(j, "eps0", "", 0.25);
  c.bs.k_cap_const = get_number(j, "k_cap_const", "", 1.0);
  c.bs.e_center = get_number(j, "e_center", "", 0.0);
  if (member(j, "seed_energy")) c.seed_energy = get_number(j, "seed_energy", "", 0.0);

  const json& tol = get_object(j, "tolerances", "", empty);
  reject_unknown(tol, "/tolerances", {"flow", "orbit", "newton", "quadrature", "elliptic"});
  c.flow_tol = get_number(tol, "flow", "/tolerances", 1e-13);
  c.orbit_tol = get_number(tol, "orbit", "/tolerances", 1e-10);
  c.bs.newton_tol = get_number(tol, "newton", "/tolerances", 1e-10);
  c.quadrature_tol = get_number(tol, "quadrature", "/tolerances", 1e-9);
  c.class_tol = get_number(tol, "elliptic", "/tolerances", 1e-6);
  if (!(c.flow_tol >= 1e-14 && c.flow_tol <= 1e-6))
    fail("/tolerances/flow", "must lie in [1e-14, 1e-6]");
  for (auto [v, name] : {std::pair{c.orbit_tol, "orbit"}, {c.bs.newton_tol, "newton"},
                         {c.quadrature_tol, "quadrature"}, {c.class_tol, "elliptic"}})
    if (!(v > 0.0)) fail(std::string("/tolerances/") + name, "must be positive");

  const json& grid = get_object(j, "grid", "", empty);
  reject_unknown(grid, "/grid", {"e_min", "e_max", "n_energies"});
  c.e_min = get_number(grid, "e_min", "/grid", c.bs.e_center - 4.0 * c.bs.eps0);
  c.e_max = get_number(grid, "e_max", "/grid", c.bs.e_center + 4.0 * c.bs.eps0);
  c.n_energies = get_int(grid, "n_energies", "/grid", 9);
  if (c.n_energies < 5 || c.n_energies % 2 == 0)
    fail("/grid/n_energies", "must be odd and at least 5");
  if (!(c.e_min < c.e_max)) fail("/grid/e_max", "must exceed e_min");

  const json& idx = get_object(j, "index", "", empty);
  reject_unknown(idx, "/index", {"n_samples"});
  c.index_samples = get_int(idx, "n_samples", "/index", 64);
  if (c.index_samples < 2) fail("/index/n_samples", "must be at least 2");

  const json& nr = get_object(j, "nonresonance", "", empty);
  reject_unknown(nr, "/nonresonance", {"k_max", "tol"});
  c.nonres_k_max = get_int(nr, "k_max", "/nonresonance", 10);
  c.nonres_tol = get_number(nr, "tol", "/nonresonance", 1e-9);
  if (c.nonres_k_max < 0 || c.nonres_k_max > 30) fail("/nonresonance/k_max", "must lie in [0, 30]");

  const json& zz = get_object(j, "zeta", "", empty);
  reject_unknown(zz, "/zeta", {"n_degree"});
  c.zeta_degree = get_int(zz, "n_degree", "/zeta", -1);

  const json& out = get_object(j, "output", "", empty);
  reject_unknown(out, "/output", {"format", "path"});
  if (const json* f = member(out, "format")) {
    if (!f->is_string()) fail("/output/format", "expected a string");
    c.format = f->get<std::string>();
  }
  if (c.format != "csv" && c.format != "json") fail("/output/format", "must be csv or json");
  if (const json* p = member(out, "path")) {
    if (!p->is_string()) fail("/output/path", "expected a string");
    c.out_path = p->get<std::string>();
  }

  if (const json* g = member(j, "orbit_guess")) {
    if (!g->is_object()) fail("/orbit_guess", "expected an object");
    reject_unknown(*g, "/orbit_guess", {"state", "period"});
    const json* st = member(*g, "state");
    if (!st || !st->is_array()) fail("/orbit_guess/state", "expected an array");
    Vec z(static_cast<long>(st->size()));
    for (std::size_t i = 0; i < st->size(); ++i) {
      if (!(*st)[i].is_number()) fail("/orbit_guess/state/" + std::to_string(i), "expected a number");
      z[static_cast<long>(i)] = (*st)[i].get<double>();
    }
    OrbitGuess og;
    og.state = PhaseState::unpack(z);
    og.period = get_number(*g, "period", "/orbit_guess", std::nullopt);
    c.orbit_guess = og;
  }

  if (!(c.bs.h > 0.0 && c.bs.h <= 0.5)) fail("/h", "must lie in (0, 0.5]");
  if (!(c.bs.delta > 0.0 && c.bs.delta < 1.0)) fail("/delta", "must lie in (0, 1)");
  if (!(c.bs.eps0 > 0.0)) fail("/eps0", "must be positive");
  if (!(c.bs.k_cap_const > 0.0)) fail("/k_cap_const", "must be positive");
  try {
    const HamiltonianSystem s = c.system();
    if (c.orbit_guess && c.orbit_guess->state.packed().size() != s.dim_phase())
      fail("/orbit_guess/state", "wrong dimension for this system");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("/", 0) == 0) throw;
    fail("/system/params", msg);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace bsq
