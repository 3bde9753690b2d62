#include "gkdv/cli.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gkdv/cascade.hpp"
#include "gkdv/catalog.hpp"
#include "gkdv/errors.hpp"
#include "gkdv/evolve.hpp"
#include "gkdv/io.hpp"
#include "gkdv/profile.hpp"
#include "gkdv/verify.hpp"

namespace gkdv {

namespace {

ParamBindings parse_params(const std::vector<std::string>& items) {
  ParamBindings out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
      throw ConfigError("--param " + name + ": '" + text + "' is not a finite number");
    if (!out.emplace(name, v).second) throw ConfigError("parameter '" + name + "' given twice");
  }
  return out;
}

Json params_json(const ParamBindings& p) {
  Json j = Json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

bool evaluable(const Nonlinearity& a, double u) {
  try {
    return std::isfinite(a(u));
  } catch (const DomainError&) {
    return false;
  }
}

// [-4, 4] unless a is undefined for negative u (then [0, 4]) or at 0
// (then the lower end moves to 1e-3).
std::pair<double, double> resolve_domain(const RunConfig& cfg, const Nonlinearity& a) {
  double lo = -4.0, hi = 4.0;
  if (!cfg.y_min) {
    for (int k = 1; k <= 64; ++k)
      if (!evaluable(a, -4.0 * k / 64)) {
        lo = 0.0;
        break;
      }
    if (!evaluable(a, 0.0)) lo = 1e-3;
  }
  if (cfg.y_min) lo = *cfg.y_min;
  if (cfg.y_max) hi = *cfg.y_max;
  return {lo, hi};
}

struct Model {
  NonlinearityExpr expr;
  ParamBindings params;
  Nonlinearity a;
  CascadeConfig cascade;
};

Model build_model(const RunConfig& cfg) {
  NonlinearityExpr expr = parse(cfg.nonlinearity);
  ParamBindings params = parse_params(cfg.params);
  Nonlinearity a = Nonlinearity::bind(expr, params);
  CascadeConfig cc{expr, params, cfg.c, cfg.C2, cfg.C3, cfg.y_base};
  std::tie(cc.y_min, cc.y_max) = resolve_domain(cfg, a);
  return {std::move(expr), std::move(params), std::move(a), std::move(cc)};
}

Json model_json(const RunConfig& cfg, const Model& m, const Cascade& f) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = cfg.subcommand;
  j["nonlinearity"] = cfg.nonlinearity;
  j["params"] = params_json(m.params);
  j["c"] = cfg.c;
  j["C1"] = cfg.C1;
  j["C2"] = cfg.C2;
  j["C3"] = cfg.C3;
  j["y_min"] = f.y_min();
  j["y_max"] = f.y_max();
  j["y_base"] = f.y_base();
  return j;
}

Json turning_json(const std::vector<TurningPoint>& tps) {
  Json arr = Json::array();
  for (const auto& tp : tps) arr.push_back(Json{{"y", tp.y}, {"kind", to_string(tp.kind)}, {"slope", tp.slope}});
  return arr;
}

WaveProfile make_profile(const Cascade& f, const ProfileOptions& opt, std::optional<double> y_start,
                         std::optional<int> sign) {
  if (!y_start) y_start = default_start(f);
  if (!y_start)
    throw ConfigError("no simple turning point on the domain; give --ystart (and --sign) explicitly");
  const int s = sign ? *sign : default_sign(f, *y_start);
  WaveProfile p = integrate_profile(f, opt, *y_start, s);
  prolong(p, f);
  return p;
}

int cmd_profile(const RunConfig& cfg, std::ostream& out) {
  const Model m = build_model(cfg);
  const Cascade f(m.cascade);
  ProfileOptions opt;
  opt.z_min = cfg.z_min;
  opt.z_max = cfg.z_max;
  opt.points = cfg.points;
  opt.z_start = cfg.z_start;
  opt.C1 = cfg.C1;
  opt.abs_tol = cfg.abs_tol;
  opt.rel_tol = cfg.rel_tol;
  opt.guard = cfg.guard;
  const std::optional<double> y_start = cfg.y_start ? cfg.y_start : default_start(f);
  const WaveProfile p = make_profile(f, opt, y_start, cfg.sign);

  Table t{{"z", "y", "y1", "y2"}, {}};
  for (std::size_t i = 0; i < p.size(); ++i) t.rows.push_back({p.z[i], p.y[i], p.y1[i], p.y2[i]});
  write_text(cfg.out, to_csv(t), out);

  if (!cfg.json.empty()) {
    Json j = model_json(cfg, m, f);
    j["z_min"] = opt.z_min;
    j["z_max"] = opt.z_max;
    j["points"] = p.size();
    j["z_start"] = opt.z_start;
    j["y_start"] = *y_start;
    j["sign"] = cfg.sign ? *cfg.sign : default_sign(f, *y_start);
    j["turning_points"] = turning_json(find_turning_points(f));
    j["turning_z"] = p.turning_z;
    j["columns"] = t.header;
    write_text(cfg.json, to_json_text(j), out);
  }
  return kExitOk;
}

int cmd_cascade_table(const RunConfig& cfg, std::ostream& out) {
  if (cfg.table_points < 2) throw ConfigError("--points must be at least 2");
  const Model m = build_model(cfg);
  const Cascade f(m.cascade);
  // H3 is measured from the default profile start; NaN where 1/sqrt(R) is not
  // integrable along the way.
  const std::optional<double> ref = cfg.y_start ? cfg.y_start : default_start(f);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Table t{{"y", "H1", "H2", "R", "H3"}, {}};
  const std::size_t n = cfg.table_points;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = i + 1 == n ? f.y_max()
                                : f.y_min() + (f.y_max() - f.y_min()) * static_cast<double>(i) /
                                                  static_cast<double>(n - 1);
    double h3 = nan;
    if (ref) {
      try {
        h3 = f.h3(*ref, y).value;
      } catch (const DomainError&) {
      } catch (const NumericalError&) {
      }
    }
    t.rows.push_back({y, f.h1(y).value, f.h2(y).value, f.radicand(y), h3});
  }
  write_text(cfg.out, to_csv(t), out);
  if (!cfg.json.empty()) {
    Json j = model_json(cfg, m, f);
    j["points"] = n;
    j["h3_reference"] = ref ? Json(*ref) : Json(nullptr);
    j["turning_points"] = turning_json(find_turning_points(f));
    j["columns"] = t.header;
    write_text(cfg.json, to_json_text(j), out);
  }
  return kExitOk;
}

std::string family_params(const CatalogEntry& e) {
  std::string s;
  for (const auto& p : e.param_names) s += (s.empty() ? "" : " ") + p;
  return s.empty() ? "-" : s;
}

int cmd_catalog_list(const RunConfig& cfg, std::ostream& out) {
  std::string text = fmt::format("{:<18} {:<22} {:<12} {:<9} {:>10}  {}\n", "id", "a(u)", "params", "validated",
                                 "residual", "constraints");
  Json arr = Json::array();
  for (const auto& e : list_catalog()) {
    text += fmt::format("{:<18} {:<22} {:<12} {:<9} {:>10.2e}  {}\n", e.id, e.a_source, family_params(e),
                        e.validated ? "yes" : "no", e.screen_residual, e.constraints);
    if (!e.note.empty()) text += fmt::format("{:<18} note: {}\n", "", e.note);
    arr.push_back(Json{{"id", e.id},
                       {"a", e.a_source},
                       {"params", e.param_names},
                       {"formula", e.formula},
                       {"constraints", e.constraints},
                       {"validated", e.validated},
                       {"screen_residual", e.screen_residual},
                       {"note", e.note}});
  }
  write_text(cfg.out, text, out);
  if (!cfg.json.empty()) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "catalog";
    j["entries"] = std::move(arr);
    write_text(cfg.json, to_json_text(j), out);
  }
  return kExitOk;
}

int cmd_catalog_eval(const RunConfig& cfg, std::ostream& out) {
  if (cfg.entry.empty()) throw ConfigError("catalog eval needs --id");
  if (cfg.x_points < 2 || !(cfg.x_max > cfg.x_min)) throw ConfigError("need --xmax > --xmin and --points >= 2");
  const CatalogEntry& e = find_entry(cfg.entry);
  ParamBindings params = default_params(e);
  for (const auto& [k, v] : parse_params(cfg.params)) params[k] = v;
  check_constraints(e, cfg.c, params);

  using D1 = Dual<double>;
  using D3 = Dual<Dual<Dual<double>>>;
  Table t{{"x", "t", "u", "u_x", "u_xx", "u_xxx", "u_t"}, {}};
  const std::size_t n = cfg.x_points;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = i + 1 == n ? cfg.x_max
                                : cfg.x_min + (cfg.x_max - cfg.x_min) * static_cast<double>(i) /
                                                  static_cast<double>(n - 1);
    const D3 ux = eval_entry<D3>(e, seed_variable<D3>(x), D3(cfg.t), cfg.c, cfg.C1, params);
    const D1 ut = eval_entry<D1>(e, D1(x), seed_variable<D1>(cfg.t), cfg.c, cfg.C1, params);
    t.rows.push_back({x, cfg.t, derivative<0>(ux), derivative<1>(ux), derivative<2>(ux), derivative<3>(ux), ut.der});
  }
  write_text(cfg.out, to_csv(t), out);
  if (!cfg.json.empty()) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "catalog-eval";
    j["id"] = e.id;
    j["a"] = e.a_source;
    j["formula"] = e.formula;
    j["params"] = params_json(params);
    j["c"] = cfg.c;
    j["C1"] = cfg.C1;
    j["validated"] = e.validated;
    j["columns"] = t.header;
    write_text(cfg.json, to_json_text(j), out);
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  VerifyConfig vc;
  vc.a_source = cfg.nonlinearity;
  vc.params = parse_params(cfg.params);
  vc.c = cfg.c;
  vc.C2 = cfg.C2;
  vc.C3 = cfg.C3;
  vc.y_base = cfg.y_base;
  vc.jet_points = cfg.jet_points;
  vc.grid_points = cfg.grid_points;
  vc.pde_points = cfg.pde_points;
  vc.drift_length = cfg.drift_length;
  vc.seed = cfg.seed;
  const Nonlinearity a = Nonlinearity::bind(parse(cfg.nonlinearity), vc.params);
  std::tie(vc.y_min, vc.y_max) = resolve_domain(cfg, a);
  const auto reports = full_report(vc);
  const bool pass = all_pass(reports);

  std::string table = fmt::format("{:<34} {:>11} {:>9}  {}\n", "check", "residual", "tol", "result");
  Json checks = Json::array();
  for (const auto& r : reports) {
    table += fmt::format("{:<34} {:>11.3e} {:>9.1e}  {}\n", r.id, r.max_residual, r.tolerance, r.pass ? "pass" : "FAIL");
    checks.push_back(Json{{"id", r.id},
                          {"max_residual", r.max_residual},
                          {"tolerance", r.tolerance},
                          {"pass", r.pass},
                          {"sample", r.sample}});
  }
  table += pass ? "all checks pass\n" : "some checks FAILED\n";
  err << table;

  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "verify";
  j["nonlinearity"] = cfg.nonlinearity;
  j["params"] = params_json(vc.params);
  j["c"] = vc.c;
  j["C2"] = vc.C2;
  j["C3"] = vc.C3;
  j["y_min"] = vc.y_min;
  j["y_max"] = vc.y_max;
  j["seed"] = vc.seed;
  j["pass"] = pass;
  j["checks"] = std::move(checks);
  write_text(cfg.out, to_json_text(j), out);
  if (!cfg.json.empty() && cfg.json != cfg.out) write_text(cfg.json, to_json_text(j), out);
  return pass ? kExitOk : kExitFailure;
}

double wrap(double xi, double L) {
  double r = std::fmod(xi + L / 2, L);
  if (r < 0) r += L;
  return r - L / 2;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SpectralGrid g{cfg.N, cfg.L};
  g.validate();
  if (cfg.dt < 0) throw ConfigError("--dt must be >= 0 (0 selects the default)");

  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "evolve";

  // reference travelling wave F(xi), u(x, t) = F(x - c t - C1)
  std::function<double(double)> F;
  std::optional<WaveProfile> profile;
  ParamBindings params;
  Nonlinearity a = Nonlinearity::bind(parse("u"), {});
  if (!cfg.entry.empty()) {
    const CatalogEntry& e = find_entry(cfg.entry);
    params = default_params(e);
    for (const auto& [k, v] : parse_params(cfg.params)) params[k] = v;
    check_constraints(e, cfg.c, params);
    a = Nonlinearity::bind(parse(e.a_source), params);
    F = [&e, &cfg, params](double xi) { return eval_entry<double>(e, xi, 0.0, cfg.c, 0.0, params); };
    j["initial"] = Json{{"source", "catalog"}, {"id", e.id}, {"formula", e.formula}};
    j["nonlinearity"] = e.a_source;
  } else {
    const Model m = build_model(cfg);
    params = m.params;
    a = m.a;
    const Cascade f(m.cascade);
    ProfileOptions opt;
    opt.z_min = -g.L / 2;
    opt.z_max = g.L / 2;
    opt.points = 4 * g.N + 1;
    profile = make_profile(f, opt, cfg.y_start, cfg.sign);
    auto interp = std::make_shared<ProfileInterpolant>(*profile);
    F = [interp](double xi) { return (*interp)(xi); };
    j["initial"] = Json{{"source", "profile"}, {"y_start", profile->y[profile->size() / 2]}};
    j["nonlinearity"] = cfg.nonlinearity;
  }
  j["params"] = params_json(params);
  j["c"] = cfg.c;
  j["C1"] = cfg.C1;
  j["N"] = g.N;
  j["L"] = g.L;
  j["T"] = cfg.T;

  const double L = g.L;
  const FieldState s0 = initial_state(g, [&](double x) { return F(wrap(x - cfg.C1, L)); });
  const EvolveResult r = evolve_gkdv(s0, a, g, cfg.dt, cfg.T, cfg.snapshot_every);
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';

  std::vector<FieldState> snaps = r.snapshots;
  if (snaps.empty()) snaps = {s0, r.state};
  Table t{{"t", "x", "u"}, {}};
  for (const auto& s : snaps)
    for (std::size_t i = 0; i < g.N; ++i) t.rows.push_back({s.t, g.x(i), s.u[i]});
  write_text(cfg.out, to_csv(t), out);

  const double peak0 = peak_position(g, s0.u);
  Json traj = Json::array();
  for (const auto& s : snaps)
    traj.push_back(Json{{"t", s.t}, {"peak", peak_position(g, s.u)}, {"expected", wrap(peak0 + cfg.c * s.t, L)}});
  const ShapeError se = shape_error(g, r.state, [&](double xi) { return F(wrap(xi, L)); }, cfg.c, cfg.C1);
  const double m0 = mass(g, s0.u), m1 = mass(g, r.state.u);

  j["dt"] = r.dt;
  j["steps"] = r.steps;
  j["t_final"] = r.state.t;
  j["peak_trajectory"] = std::move(traj);
  j["shape_error"] = Json{{"raw", se.raw}, {"aligned", se.aligned}, {"phase", se.phase}};
  j["mass"] = Json{{"initial", m0}, {"final", m1}, {"change", m1 - m0}};
  j["warnings"] = r.warnings;
  if (!cfg.json.empty()) write_text(cfg.json, to_json_text(j), out);
  return kExitOk;
}

void add_model_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--nonlinearity,-a", cfg.nonlinearity, "a(u) in the expression grammar");
  sub->add_option("--param,-p", cfg.params, "parameter binding name=value (repeatable)")->default_str("");
  sub->add_option("--c", cfg.c, "wave speed");
  sub->add_option("--C1", cfg.C1, "phase shift");
  sub->add_option("--C2", cfg.C2, "first integration constant");
  sub->add_option("--C3", cfg.C3, "second integration constant");
  sub->add_option("--ymin", cfg.y_min, "lower end of the amplitude domain")->default_str("");
  sub->add_option("--ymax", cfg.y_max, "upper end of the amplitude domain")->default_str("");
  sub->add_option("--ybase", cfg.y_base, "base point of the quadratures")->default_str("");
}

void add_output_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--out,-o", cfg.out, "primary output path, - for stdout");
  sub->add_option("--json", cfg.json, "JSON metadata path, - for stdout")->default_str("");
}

void add_start_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--ystart", cfg.y_start, "profile start value (default: outermost simple turning point)")->default_str("");
  sub->add_option("--sign", cfg.sign, "initial branch of dy/dz")->default_str("")->check(CLI::IsMember({-1, 1}));
}

bool is_number(const std::string& v) {
  double d = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
  return !v.empty() && ec == std::errc() && ptr == v.data() + v.size();
}

std::string toml_value(const std::string& v) { return is_number(v) ? v : "\"" + v + "\""; }

// Options as key=value lines that --config accepts; unset optional values
// are written as comments.
void dump_config(const CLI::App& app, const std::string& prefix, std::string& text) {
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
    const std::string key = prefix + opt->get_lnames().front();
    text += "# " + opt->get_description() + "\n";
    const auto& given = opt->results();
    if (opt->get_expected_max() > 1) {
      std::string list;
      for (const auto& r : given) list += (list.empty() ? "" : ", ") + toml_value(r);
      text += (list.empty() ? "# " : "") + key + "=[" + list + "]\n";
    } else if (!given.empty()) {
      text += key + "=" + toml_value(given.back()) + "\n";
    } else if (!opt->get_default_str().empty()) {
      text += key + "=" + toml_value(opt->get_default_str()) + "\n";
    } else {
      text += "# " + key + "=\n";
    }
  }
  // options of different subcommands share storage, so only the invoked
  // subcommand is dumped when there is one
  std::vector<const CLI::App*> subs;
  for (const CLI::App* s : app.get_subcommands()) subs.push_back(s);
  if (subs.empty()) subs = app.get_subcommands([](const CLI::App*) { return true; });
  for (const CLI::App* sub : subs) dump_config(*sub, prefix + sub->get_name() + ".", text);
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.subcommand == "profile") return cmd_profile(cfg, out);
  if (cfg.subcommand == "cascade-table") return cmd_cascade_table(cfg, out);
  if (cfg.subcommand == "catalog") {
    if (cfg.catalog_action == "list") return cmd_catalog_list(cfg, out);
    if (cfg.catalog_action == "eval") return cmd_catalog_eval(cfg, out);
    throw ConfigError("catalog needs an action: list or eval");
  }
  if (cfg.subcommand == "verify") return cmd_verify(cfg, out, err);
  if (cfg.subcommand == "evolve") return cmd_evolve(cfg, out, err);
  throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Travelling waves of generalized KdV equations"};
  app.name("gkdv");
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "read options from a TOML/INI file; flags override it");
  bool show_config = false;
  app.add_flag("--show-config", show_config, "print the effective configuration and exit")->configurable(false);
  app.require_subcommand(0, 1);

  auto* profile = app.add_subcommand("profile", "integrate a travelling-wave profile y(z)");
  add_model_options(profile, cfg);
  add_start_options(profile, cfg);
  add_output_options(profile, cfg);
  profile->add_option("--zmin", cfg.z_min, "left end of the z grid");
  profile->add_option("--zmax", cfg.z_max, "right end of the z grid");
  profile->add_option("--points", cfg.points, "number of z samples");
  profile->add_option("--zstart", cfg.z_start, "z at which y = ystart");
  profile->add_option("--abs-tol", cfg.abs_tol, "integrator absolute tolerance")->check(CLI::PositiveNumber);
  profile->add_option("--rel-tol", cfg.rel_tol, "integrator relative tolerance")->check(CLI::PositiveNumber);
  profile->add_option("--guard", cfg.guard, "relative radicand level of the turning-point model")
      ->check(CLI::PositiveNumber);

  auto* table = app.add_subcommand("cascade-table", "tabulate H1, H2, R and H3 over the domain");
  add_model_options(table, cfg);
  add_output_options(table, cfg);
  table->add_option("--points", cfg.table_points, "number of y samples");
  table->add_option("--ystart", cfg.y_start, "reference point of H3 (default: profile start)")->default_str("");

  auto* catalog = app.add_subcommand("catalog", "closed-form solution catalog");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "list entries with constraints and validation status");
  add_output_options(list, cfg);
  auto* ev = catalog->add_subcommand("eval", "sample an entry and its derivatives");
  add_output_options(ev, cfg);
  ev->add_option("--id", cfg.entry, "catalog entry id")->required();
  ev->add_option("--param,-p", cfg.params, "parameter binding name=value (repeatable)")->default_str("");
  ev->add_option("--c", cfg.c, "wave speed");
  ev->add_option("--C1", cfg.C1, "phase shift");
  ev->add_option("--xmin", cfg.x_min, "left end of the x grid");
  ev->add_option("--xmax", cfg.x_max, "right end of the x grid");
  ev->add_option("--points", cfg.x_points, "number of x samples");
  ev->add_option("--t", cfg.t, "time");

  auto* verify = app.add_subcommand("verify", "run every consistency check; exit 1 if any fails");
  add_model_options(verify, cfg);
  add_output_options(verify, cfg);
  verify->add_option("--seed", cfg.seed, "seed of the sampled points");
  verify->add_option("--jet-points", cfg.jet_points, "jet points for the geometric checks");
  verify->add_option("--grid-points", cfg.grid_points, "grid points for the cascade checks");
  verify->add_option("--pde-points", cfg.pde_points, "sample points per catalog entry");
  verify->add_option("--drift-length", cfg.drift_length, "z length of the conserved-quantity run")
      ->check(CLI::PositiveNumber);

  auto* evolve = app.add_subcommand("evolve", "evolve a travelling wave with the pseudo-spectral solver");
  add_model_options(evolve, cfg);
  add_start_options(evolve, cfg);
  add_output_options(evolve, cfg);
  evolve->add_option("--id", cfg.entry, "start from a catalog entry instead of the integrated profile")->default_str("");
  evolve->add_option("--N", cfg.N, "grid size, a power of two >= 64");
  evolve->add_option("--L", cfg.L, "period");
  evolve->add_option("--dt", cfg.dt, "time step, 0 for the default");
  evolve->add_option("--T", cfg.T, "final time")->check(CLI::NonNegativeNumber);
  evolve->add_option("--snapshot-every", cfg.snapshot_every, "steps between snapshots, 0 for first and last");

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::Success&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (show_config) {
    std::string text;
    dump_config(app, "", text);
    out << text;
    return kExitOk;
  }
  for (auto* sub : app.get_subcommands()) {
    cfg.subcommand = sub->get_name();
    for (auto* inner : sub->get_subcommands()) cfg.catalog_action = inner->get_name();
  }
  if (cfg.subcommand.empty()) {
    err << app.help();
    return kExitUsage;
  }

  try {
    return dispatch(cfg, out, err);
  } catch (const ParseError& e) {
    err << "error: cannot parse nonlinearity '" << cfg.nonlinearity << "': " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace gkdv
