#include "mrtlb/config.hpp"

#include <fstream>

#include "json.hpp"

namespace mrtlb {

namespace {

using nlohmann::json;

double parse_number(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      if (slash == std::string::npos) return std::stod(s);
      const double num = std::stod(s.substr(0, slash));
      const double den = std::stod(s.substr(slash + 1));
      if (den == 0.0) throw ConfigError("config: zero denominator in \"" + key + "\"");
      return num / den;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("config: cannot parse number \"" + s + "\" for \"" + key + "\"");
    }
  }
  throw ConfigError("config: field \"" + key + "\" must be a number or rational string");
}

std::vector<double> parse_number_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("config: field \"" + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(parse_number(v, key));
  return out;
}

}  // namespace

Discretization RunConfig::discretization() const {
  Discretization disc;
  disc.dx = dx;
  disc.dt = dt ? *dt : *scaling_ratio * dx * dx;
  return disc;
}

std::vector<double> RunConfig::eps_tilde_values() const {
  if (!eps_tilde.empty()) return eps_tilde;
  const double xi = discretization().xi();
  std::vector<double> out(kappa.size());
  for (size_t i = 0; i < kappa.size(); ++i) out[i] = kappa[i] * xi;
  return out;
}

std::vector<double> RunConfig::kappa_values() const {
  if (!kappa.empty()) return kappa;
  const double xi = discretization().xi();
  std::vector<double> out(eps_tilde.size());
  for (size_t i = 0; i < eps_tilde.size(); ++i) out[i] = eps_tilde[i] / xi;
  return out;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  if (j.contains("d")) cfg.d = j["d"].get<int>();
  if (cfg.d < 1) throw ConfigError("config: d must be >= 1");

  if (j.contains("family")) {
    const std::string f = j["family"].get<std::string>();
    if (f == "full") cfg.family = LatticeFamily::Full;
    else if (f == "axis") cfg.family = LatticeFamily::Axis;
    else throw ConfigError("config: family must be \"full\" or \"axis\"");
  }

  const bool has_kappa = j.contains("kappa"), has_eps = j.contains("eps_tilde");
  if (has_kappa == has_eps)
    throw ConfigError("config: exactly one of \"kappa\" / \"eps_tilde\" is required");
  if (has_kappa) cfg.kappa = parse_number_list(j["kappa"], "kappa");
  if (has_eps) cfg.eps_tilde = parse_number_list(j["eps_tilde"], "eps_tilde");
  if (int((has_kappa ? cfg.kappa : cfg.eps_tilde).size()) != cfg.d)
    throw ConfigError("config: expected one diffusion entry per axis");

  if (j.contains("eta")) cfg.eta = parse_number(j["eta"], "eta");
  if (j.contains("source_const")) cfg.source_const = parse_number(j["source_const"], "source_const");
  if (j.contains("omega_tilde")) cfg.omega_tilde = parse_number(j["omega_tilde"], "omega_tilde");
  if (j.contains("s2_axis")) cfg.s2_axis = parse_number(j["s2_axis"], "s2_axis");

  if (!j.contains("dx")) throw ConfigError("config: \"dx\" is required");
  cfg.dx = parse_number(j["dx"], "dx");
  if (!(cfg.dx > 0)) throw ConfigError("config: dx must be positive");

  const bool has_dt = j.contains("dt"), has_ratio = j.contains("scaling_ratio");
  if (has_dt == has_ratio)
    throw ConfigError("config: exactly one of \"dt\" / \"scaling_ratio\" is required");
  if (has_dt) cfg.dt = parse_number(j["dt"], "dt");
  if (has_ratio) cfg.scaling_ratio = parse_number(j["scaling_ratio"], "scaling_ratio");
  if (!(cfg.discretization().dt > 0)) throw ConfigError("config: dt must be positive");

  if (j.contains("t_final")) cfg.t_final = parse_number(j["t_final"], "t_final");

  if (j.contains("params_mode")) {
    const std::string m = j["params_mode"].get<std::string>();
    if (m == "general") cfg.params_mode = ParamsMode::General;
    else if (m == "isotropic_closed_form") cfg.params_mode = ParamsMode::IsotropicClosedForm;
    else if (m == "axis_closed_form") cfg.params_mode = ParamsMode::AxisClosedForm;
    else throw ConfigError("config: unknown params_mode \"" + m + "\"");
  }
  if (cfg.family == LatticeFamily::Axis) cfg.params_mode = ParamsMode::AxisClosedForm;

  if (j.contains("init_scheme")) {
    const std::string s = j["init_scheme"].get<std::string>();
    if (s == "equilibrium") cfg.init_scheme = InitChoice::Equilibrium;
    else if (s == "fourth_order") cfg.init_scheme = InitChoice::FourthOrder;
    else if (s == "both") cfg.init_scheme = InitChoice::Both;
    else throw ConfigError("config: unknown init_scheme \"" + s + "\"");
  }

  if (j.contains("case")) {
    const auto& c = j["case"];
    if (c.contains("name")) cfg.case_name = c["name"].get<std::string>();
    if (c.contains("gamma0")) cfg.gamma0 = parse_number(c["gamma0"], "gamma0");
    if (cfg.case_name != "gauss_hill" && cfg.case_name != "sine_source")
      throw ConfigError("config: unknown case \"" + cfg.case_name + "\"");
  }

  if (j.contains("scan_resolution")) cfg.scan_resolution = j["scan_resolution"].get<int>();

  if (j.contains("region")) {
    const auto& r = j["region"];
    if (r.contains("kind")) cfg.region_kind = r["kind"].get<std::string>();
    if (cfg.region_kind != "stability" && cfg.region_kind != "solvability")
      throw ConfigError("config: region kind must be \"stability\" or \"solvability\"");
    auto field = [&](const char* k, double dflt) {
      return r.contains(k) ? parse_number(r[k], k) : dflt;
    };
    cfg.region_grid.x_min = field("x_min", 0.0);
    cfg.region_grid.x_max = field("x_max", 1.0);
    cfg.region_grid.y_min = field("y_min", 0.0);
    cfg.region_grid.y_max = field("y_max", 1.0);
    cfg.region_grid.nx = r.contains("nx") ? r["nx"].get<int>() : 32;
    cfg.region_grid.ny = r.contains("ny") ? r["ny"].get<int>() : 32;
    if (cfg.region_grid.nx < 1 || cfg.region_grid.ny < 1)
      throw ConfigError("config: region grid must be at least 1x1");
  }

  if (j.contains("rate_overrides")) {
    for (const auto& [key, value] : j["rate_overrides"].items())
      cfg.rate_overrides[key] = parse_number(value, key);
  }

  if (j.contains("dx_list")) cfg.dx_list = parse_number_list(j["dx_list"], "dx_list");
  if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
  if (j.contains("dump_matrix")) cfg.dump_matrix_path = j["dump_matrix"].get<std::string>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();

  finalize_defaults(cfg);
  return cfg;
}

void finalize_defaults(RunConfig& cfg) {
  if (cfg.omega_tilde == 0.0) cfg.omega_tilde = default_omega_tilde(cfg.d);
  if (cfg.scan_resolution == 0) cfg.scan_resolution = default_scan_resolution(cfg.d);
}

}  // namespace mrtlb
