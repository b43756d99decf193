#include "bsq/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsq/config.hpp"
#include "bsq/errors.hpp"
#include "bsq/format.hpp"
#include "bsq/model_oracle.hpp"
#include "bsq/pipeline.hpp"

namespace bsq::cli {

using nlohmann::json;

namespace {

struct Options {
  std::string config_path;
  std::string out_path;
  std::string format;
  std::string input_path;
  bool strict = false;
  bool timings = false;
  int threads = 1;
  std::optional<double> seed_energy;
};

// Rows for CSV and the JSON "results" member of one subcommand.
struct Output {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  json results;
  std::vector<std::string> warnings;
  int exit_code = kOk;
};

std::string fmt_int(long v) { return std::to_string(v); }

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json kjson(const KVec& k) { return json(k); }

std::vector<std::string> k_columns(int d) {
  std::vector<std::string> c;
  for (int j = 1; j <= d; ++j) c.push_back("k_" + std::to_string(j));
  return c;
}

Output do_orbit(const RunConfig& cfg) {
  const HamiltonianSystem sys = cfg.system();
  const PeriodicOrbit o = seed_orbit(sys, cfg);
  Output out;
  out.header = {"E", "T", "closure_error", "iterations"};
  for (int i = 1; i <= sys.dim_phase(); ++i) out.header.push_back("z_" + std::to_string(i));
  std::vector<std::string> row = {fmt_double(o.energy), fmt_double(o.period),
                                  fmt_double(o.closure_error), fmt_int(o.iterations)};
  for (long i = 0; i < o.base_point.size(); ++i) row.push_back(fmt_double(o.base_point[i]));
  out.rows.push_back(row);
  out.results = {{"energy", o.energy},
                 {"period", o.period},
                 {"closure_error", o.closure_error},
                 {"iterations", o.iterations},
                 {"base_point", std::vector<double>(o.base_point.data(),
                                                    o.base_point.data() + o.base_point.size())}};
  return out;
}

Output do_floquet(const RunConfig& cfg) {
  const HamiltonianSystem sys = cfg.system();
  const PeriodicOrbit o = seed_orbit(sys, cfg);
  const FloquetSpectrum s = floquet_spectrum(sys, o, cfg.flow_tol, cfg.class_tol);
  Output out;
  out.header = {"j", "re_lambda", "im_lambda", "re_mu", "im_mu", "class", "krein",
                "first_kind", "selected"};
  json mult = json::array();
  for (std::size_t j = 0; j < s.multipliers.size(); ++j) {
    const bool sel = std::find(s.selected.begin(), s.selected.end(), static_cast<int>(j)) !=
                     s.selected.end();
    out.rows.push_back({fmt_int(static_cast<long>(j)), fmt_double(s.multipliers[j].real()),
                        fmt_double(s.multipliers[j].imag()), fmt_double(s.exponents[j].real()),
                        fmt_double(s.exponents[j].imag()), class_name(s.classes[j]),
                        fmt_double(s.krein[j]), s.first_kind[j] ? "1" : "0", sel ? "1" : "0"});
    mult.push_back({{"lambda", cjson(s.multipliers[j])},
                    {"mu", cjson(s.exponents[j])},
                    {"class", class_name(s.classes[j])},
                    {"krein", s.krein[j]},
                    {"first_kind", static_cast<bool>(s.first_kind[j])},
                    {"selected", sel}});
  }
  json dp = json::array();
  for (long i = 0; i < s.section_monodromy.rows(); ++i) {
    std::vector<double> r;
    for (long j = 0; j < s.section_monodromy.cols(); ++j) r.push_back(s.section_monodromy(i, j));
    dp.push_back(r);
  }
  out.results = {{"energy", o.energy},
                 {"period", o.period},
                 {"section_monodromy", dp},
                 {"multipliers", mult},
                 {"pairing_residual", s.pairing_residual}};
  return out;
}

json nonres_json(const NonResonanceReport& r) {
  json w = json::array(), s = json::array();
  for (const KVec& k : r.violations_weak) w.push_back(kjson(k));
  for (const KVec& k : r.violations_strong) s.push_back(kjson(k));
  return {{"k_max", r.k_max},
          {"tolerance", r.tolerance},
          {"violations_weak", w},
          {"violations_strong", s}};
}

NonResonanceReport nonres_from_json(const json& j) {
  NonResonanceReport r;
  r.k_max = j.at("k_max").get<int>();
  r.tolerance = j.at("tolerance").get<double>();
  for (const json& k : j.at("violations_weak")) r.violations_weak.push_back(k.get<KVec>());
  for (const json& k : j.at("violations_strong")) r.violations_strong.push_back(k.get<KVec>());
  return r;
}

Output do_action(const RunConfig& cfg, int threads) {
  const HamiltonianSystem sys = cfg.system();
  const FamilyAnalysis fam = analyze_family(sys, cfg, threads);
  std::size_t best = 0;
  for (std::size_t i = 1; i < fam.per_orbit.size(); ++i)
    if (std::abs(fam.family.energy_grid[i] - cfg.bs.e_center) <
        std::abs(fam.family.energy_grid[best] - cfg.bs.e_center))
      best = i;
  const NonResonanceReport nr =
      check_nonresonance(fam.per_orbit[best].spectrum, cfg.nonres_k_max, cfg.nonres_tol);
  Output out;
  out.header = {"E", "S0", "T", "Re_S1", "Im_S1", "g"};
  json rows = json::array();
  for (std::size_t i = 0; i < fam.actions.size(); ++i) {
    const ActionData& a = fam.actions[i];
    out.rows.push_back({fmt_double(a.energy), fmt_double(a.s0), fmt_double(a.t_period),
                        fmt_double(a.s1.real()), fmt_double(a.s1.imag()), fmt_int(a.g)});
    json mu = json::array();
    for (const cplx& m : fam.tracked.tracked[i]) mu.push_back(cjson(m));
    rows.push_back({{"E", a.energy},
                    {"S0", a.s0},
                    {"T", a.t_period},
                    {"sub_integral", a.sub_integral},
                    {"mu_sum_term", cjson(a.mu_sum_term)},
                    {"index_term", a.index_term},
                    {"S1", cjson(a.s1)},
                    {"g", a.g},
                    {"mu", mu}});
  }
  out.results = {{"family", rows}, {"nonresonance", nonres_json(nr)}};
  if (!nr.clean()) out.warnings.push_back("non-resonance condition violated");
  return out;
}

Output do_index(const RunConfig& cfg) {
  const HamiltonianSystem sys = cfg.system();
  const PeriodicOrbit o = seed_orbit(sys, cfg);
  const FloquetSpectrum s = floquet_spectrum(sys, o, cfg.flow_tol, cfg.class_tol);
  const IndexResult r = compute_index(sys, o, s, cfg.index_samples, cfg.flow_tol);
  Output out;
  out.header = {"g", "regular_winding", "jump_count", "winding"};
  out.rows.push_back({fmt_int(r.g), fmt_double(r.regular_winding), fmt_int(r.jump_count),
                      fmt_double(r.winding)});
  json jumps = json::array();
  for (const Caustic& c : r.per_caustic) jumps.push_back({{"t", c.t}, {"jump", c.jump}});
  out.results = {{"g", r.g},
                 {"regular_winding", r.regular_winding},
                 {"jumps", jumps},
                 {"winding", r.winding},
                 {"principal_winding", r.principal_winding},
                 {"g_mod4", r.g_mod4}};
  return out;
}

void resonance_rows(Output& out, const std::vector<Resonance>& rs, int d) {
  out.header = {"m"};
  for (const auto& c : k_columns(d)) out.header.push_back(c);
  for (const char* c : {"re_E", "im_E", "residual", "iters", "in_window", "warn_nonres"})
    out.header.push_back(c);
  json arr = json::array();
  for (const Resonance& r : rs) {
    std::vector<std::string> row = {fmt_int(r.m)};
    for (int v : r.k) row.push_back(fmt_int(v));
    row.push_back(fmt_double(r.energy.real()));
    row.push_back(fmt_double(r.energy.imag()));
    row.push_back(fmt_double(r.residual));
    row.push_back(fmt_int(r.iters));
    row.push_back(r.in_window ? "1" : "0");
    row.push_back(r.warn_nonres ? "1" : "0");
    out.rows.push_back(row);
    json o = {{"m", r.m}};
    for (int j = 0; j < d; ++j) o["k_" + std::to_string(j + 1)] = r.k[j];
    o["re_E"] = r.energy.real();
    o["im_E"] = r.energy.imag();
    o["residual"] = r.residual;
    o["iters"] = r.iters;
    o["in_window"] = r.in_window;
    o["warn_nonres"] = r.warn_nonres;
    o["claimed_accuracy"] = r.claimed_accuracy;
    if (!r.alt_labels.empty()) {
      json alt = json::array();
      for (const LatticePoint& p : r.alt_labels) alt.push_back({{"m", p.m}, {"k", kjson(p.k)}});
      o["alt_labels"] = alt;
    }
    arr.push_back(o);
  }
  out.results = arr;
}

Output do_resonances(const RunConfig& cfg, const Options& opt) {
  ResonanceRun run;
  if (!opt.input_path.empty()) {
    std::ifstream in(opt.input_path);
    if (!in) throw ConfigError("cannot read input file '" + opt.input_path + "'");
    json j;
    try {
      j = json::parse(in);
      const json& fam = j.at("results").at("family");
      std::vector<ActionData> actions;
      std::vector<std::vector<cplx>> mu;
      for (const json& r : fam) {
        ActionData a;
        a.energy = r.at("E").get<double>();
        a.s0 = r.at("S0").get<double>();
        a.t_period = r.at("T").get<double>();
        a.sub_integral = r.at("sub_integral").get<double>();
        a.s1 = {r.at("S1")[0].get<double>(), r.at("S1")[1].get<double>()};
        a.g = r.at("g").get<int>();
        std::vector<cplx> m;
        for (const json& v : r.at("mu")) m.emplace_back(v[0].get<double>(), v[1].get<double>());
        actions.push_back(a);
        mu.push_back(m);
      }
      const NonResonanceReport nr = nonres_from_json(j.at("results").at("nonresonance"));
      run = run_resonances(cfg, actions, mu, nr, opt.threads);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("input file: ") + e.what());
    }
  } else {
    run = run_resonances(cfg, opt.threads);
  }
  Output out;
  resonance_rows(out, run.set.resonances, run.fit.d);
  out.warnings = run.warnings;
  return out;
}

Output do_verify(const RunConfig& cfg, bool strict) {
  const HamiltonianSystem sys = cfg.system();
  const PeriodicOrbit o = seed_orbit(sys, cfg);
  const FloquetSpectrum s = floquet_spectrum(sys, o, cfg.flow_tol, cfg.class_tol);
  const NonResonanceReport r = check_nonresonance(s, cfg.nonres_k_max, cfg.nonres_tol);
  Output out;
  out.header = {"condition"};
  for (const auto& c : k_columns(s.dim_d())) out.header.push_back(c);
  for (const KVec& k : r.violations_weak) {
    std::vector<std::string> row = {"weak"};
    for (int v : k) row.push_back(fmt_int(v));
    out.rows.push_back(row);
  }
  for (const KVec& k : r.violations_strong) {
    std::vector<std::string> row = {"strong"};
    for (int v : k) row.push_back(fmt_int(v));
    out.rows.push_back(row);
  }
  out.results = nonres_json(r);
  if (!r.clean()) {
    out.warnings.push_back("non-resonance condition violated");
    if (strict) out.exit_code = kNonResonance;
  }
  return out;
}

Output do_verify_model(const RunConfig& cfg, int threads) {
  if (cfg.kind != "model") throw ConfigError("/system/kind: verify-model requires the model system");
  const ModelSpec spec{cfg.params.coeffs, cfg.bs.h};
  const std::vector<Resonance> oracle = model_exact_resonances(spec, cfg.bs);
  const ResonanceRun run = run_resonances(cfg, threads);
  const ZetaGrid zg = zeta_zeros(spec, cfg.bs, cfg.zeta_n());
  const std::vector<Resonance>& bs = run.set.resonances;
  const std::vector<cplx>& zz = zg.located_zeros;
  const int d = spec.dim_d();

  auto nearest = [](cplx e, auto begin, auto end, auto get) {
    double best = INFINITY;
    cplx bz = NAN;
    for (auto it = begin; it != end; ++it) {
      const double dd = std::abs(get(*it) - e);
      if (dd < best) {
        best = dd;
        bz = get(*it);
      }
    }
    return bz;
  };
  Output out;
  out.header = {"m"};
  for (const auto& c : k_columns(d)) out.header.push_back(c);
  for (const char* c : {"re_oracle", "im_oracle", "re_bs", "im_bs", "re_zeta", "im_zeta", "max_diff"})
    out.header.push_back(c);
  double worst = 0.0;
  json rows = json::array();
  for (const Resonance& o : oracle) {
    const cplx b = nearest(o.energy, bs.begin(), bs.end(), [](const Resonance& r) { return r.energy; });
    const cplx z = nearest(o.energy, zz.begin(), zz.end(), [](cplx c) { return c; });
    double diff = std::max({std::abs(b - o.energy), std::abs(z - o.energy), std::abs(b - z)});
    if (!std::isfinite(diff)) diff = INFINITY;
    worst = std::max(worst, diff);
    std::vector<std::string> row = {fmt_int(o.m)};
    for (int v : o.k) row.push_back(fmt_int(v));
    for (double x : {o.energy.real(), o.energy.imag(), b.real(), b.imag(), z.real(), z.imag(), diff})
      row.push_back(fmt_double(x));
    out.rows.push_back(row);
    rows.push_back({{"m", o.m}, {"k", kjson(o.k)}, {"oracle", cjson(o.energy)},
                    {"bs", cjson(b)}, {"zeta", cjson(z)}, {"max_diff", diff}});
  }
  const bool counts = oracle.size() == bs.size() && oracle.size() == zz.size();
  const bool ok = counts && worst <= 1e-8;
  out.results = {{"rows", rows},
                 {"n_oracle", oracle.size()},
                 {"n_bs", bs.size()},
                 {"n_zeta", zz.size()},
                 {"max_diff", worst},
                 {"agree", ok}};
  out.warnings = run.warnings;
  if (std::any_of(zg.unreliable.begin(), zg.unreliable.end(), [](bool b) { return b; }))
    out.warnings.push_back("zeta zeros near the window boundary");
  if (!counts)
    out.warnings.push_back("resonance counts differ: oracle " + std::to_string(oracle.size()) +
                           ", bs " + std::to_string(bs.size()) + ", zeta " +
                           std::to_string(zz.size()));
  if (!ok) out.exit_code = kDisagreement;
  return out;
}

void emit(const Output& o, const RunConfig& cfg, const std::string& format,
          const json& timings, std::ostream& os) {
  if (format == "json") {
    json top = {{"config_echo", cfg.echo()},
                {"results", o.results},
                {"warnings", o.warnings},
                {"timings", timings}};
    os << top.dump(2) << '\n';
  } else {
    CsvWriter w(os);
    w.header(o.header);
    for (const auto& r : o.rows) w.row(r);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semiclassical resonances of a periodic orbit by Bohr-Sommerfeld rules", "bsq"};
  app.require_subcommand(1, 1);
  Options opt;
  double seed = 0.0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON configuration file")->required();
    sub->add_option("--out", opt.out_path, "output file (default: stdout)");
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--strict", opt.strict, "non-resonance violations are fatal (exit 3)");
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed-energy", seed, "energy of the seed orbit");
    sub->add_flag("--timings", opt.timings, "record wall-clock timings in JSON output");
  };
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"orbit", "periodic orbit at the seed energy"},
      {"floquet", "Floquet multipliers and exponents"},
      {"action", "actions S0, S1 and index over the energy family"},
      {"index", "Conley-Zehnder index of the seed orbit"},
      {"resonances", "full chain: resonances in the window"},
      {"verify", "non-resonance report"},
      {"verify-model", "model oracle / BS / zeta comparison"}};
  std::vector<CLI::App*> handles;
  for (const auto& [name, desc] : subs) {
    CLI::App* s = app.add_subcommand(name, desc);
    add_common(s);
    if (name == "resonances")
      s->add_option("--input", opt.input_path, "action JSON to start from instead of recomputing");
    handles.push_back(s);
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  }
  std::string sub;
  for (std::size_t i = 0; i < handles.size(); ++i)
    if (handles[i]->parsed()) {
      sub = subs[i].first;
      if (handles[i]->count("--seed-energy")) opt.seed_energy = seed;
    }

  try {
    RunConfig cfg = load_config(opt.config_path);
    if (opt.seed_energy) cfg.seed_energy = opt.seed_energy;
    if (!opt.format.empty()) cfg.format = opt.format;
    if (!opt.out_path.empty()) cfg.out_path = opt.out_path;

    const auto t0 = std::chrono::steady_clock::now();
    Output o;
    if (sub == "orbit") o = do_orbit(cfg);
    else if (sub == "floquet") o = do_floquet(cfg);
    else if (sub == "action") o = do_action(cfg, opt.threads);
    else if (sub == "index") o = do_index(cfg);
    else if (sub == "resonances") o = do_resonances(cfg, opt);
    else if (sub == "verify") o = do_verify(cfg, opt.strict);
    else o = do_verify_model(cfg, opt.threads);
    json timings = json::object();
    if (opt.timings)
      timings["total_s"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (cfg.format == "csv")
      for (const auto& w : o.warnings) err << "warning: " << w << '\n';
    if (cfg.out_path.empty()) {
      emit(o, cfg, cfg.format, timings, out);
    } else {
      std::ofstream f(cfg.out_path, std::ios::binary);
      if (!f) throw ConfigError("/output/path: cannot open '" + cfg.out_path + "' for writing");
      emit(o, cfg, cfg.format, timings, f);
    }
    return o.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConvergence;
  }
}

}  // namespace bsq::cli
