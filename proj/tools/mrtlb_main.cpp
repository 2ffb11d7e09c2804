#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "mrtlb/bench.hpp"
#include "mrtlb/config.hpp"
#include "mrtlb/csv.hpp"
#include "mrtlb/solver.hpp"
#include "mrtlb/stability.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace mrtlb;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitUnstable = 4;
constexpr int kExitDiverged = 5;

std::string resolve_out(const RunConfig& cfg, const std::string& cli_out,
                        const std::string& fallback) {
  std::string path = !cli_out.empty() ? cli_out : (!cfg.out_path.empty() ? cfg.out_path : fallback);
  if (path.find('/') == std::string::npos) {
    if (const char* dir = std::getenv("MRTLB_OUT_DIR")) path = std::string(dir) + "/" + path;
  }
  return path;
}

std::optional<ModelParams> build_model(const RunConfig& cfg, std::string* why) {
  PDEParams pde;
  pde.d = cfg.d;
  pde.kappa = cfg.kappa_values();
  pde.eta = cfg.eta;
  pde.source_const = cfg.source_const;
  const Discretization disc = cfg.discretization();
  switch (cfg.params_mode) {
    case ParamsMode::General:
      return solve_model(pde, disc, cfg.omega_tilde, cfg.s2_axis, why);
    case ParamsMode::IsotropicClosedForm:
      return isotropic_closed_form(pde, disc, cfg.omega_tilde, why);
    case ParamsMode::AxisClosedForm:
      return axis_lattice_closed_form(pde, disc, why);
  }
  return std::nullopt;
}

void append_model_rows(const ModelParams& model,
                       std::vector<std::pair<std::string, std::string>>& rows) {
  const auto& spec = model.lattice;
  const int d = spec.d;
  auto num = [](double v) { return csv::format(v, 15); };

  rows.emplace_back("d", std::to_string(d));
  rows.emplace_back("family", spec.family == LatticeFamily::Full ? "full" : "axis");
  rows.emplace_back("q", std::to_string(spec.q));
  rows.emplace_back("dx", num(model.disc.dx));
  rows.emplace_back("dt", num(model.disc.dt));
  rows.emplace_back("eta", num(model.pde.eta));
  rows.emplace_back("source_const", num(model.pde.source_const));
  for (int i = 0; i < d; ++i)
    rows.emplace_back("kappa_x" + std::to_string(i + 1), num(model.pde.kappa[i]));
  const auto dn = model.diffusion_numbers();
  for (int i = 0; i < d; ++i)
    rows.emplace_back("eps_tilde_x" + std::to_string(i + 1), num(dn.eps_tilde[i]));
  rows.emplace_back("omega_0", num(model.weights.omega0));
  for (int i = 0; i < d; ++i)
    rows.emplace_back("omega_" + std::to_string(i + 1), num(model.weights.omega_axis[i]));
  if (spec.family == LatticeFamily::Full)
    rows.emplace_back("omega_tilde", num(model.weights.omega_diag));
  rows.emplace_back("s_0", num(model.rates.s0));
  for (int i = 0; i < d; ++i) {
    rows.emplace_back("s_x" + std::to_string(i + 1), num(model.rates.s_axis[i]));
    rows.emplace_back("s_tilde_x" + std::to_string(i + 1), num(model.s_tilde_axis[i]));
  }
  for (int i = 0; i < d; ++i)
    rows.emplace_back("s_2|x" + std::to_string(i + 1) + "^2", num(model.rates.s2_diag[i]));
  if (spec.family == LatticeFamily::Full) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        rows.emplace_back(
            "s_2|x" + std::to_string(i + 1) + "x" + std::to_string(j + 1),
            num(model.rates.s2_cross[pair_index(d, i, j)]));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (j != i)
          rows.emplace_back(
              "s_3|x" + std::to_string(i + 1) + "^2x" + std::to_string(j + 1),
              num(model.rates.s3[third_order_index(d, i, j)]));
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        rows.emplace_back(
            "s_4|x" + std::to_string(i + 1) + "^2x" + std::to_string(j + 1) + "^2",
            num(model.rates.s4[pair_index(d, i, j)]));
  }
}

int cmd_params(const RunConfig& cfg, const std::string& cli_out) {
  std::string why;
  const auto model = build_model(cfg, &why);
  if (!model) {
    std::cerr << why << "\n";
    return kExitInfeasible;
  }
  if (!cfg.dump_matrix_path.empty()) {
    std::vector<std::vector<std::string>> rows;
    const auto& m = model->lattice.M;
    for (int i = 0; i < m.rows(); ++i) {
      std::vector<std::string> row;
      for (int j = 0; j < m.cols(); ++j) row.push_back(csv::format(m(i, j), 17));
      rows.push_back(row);
    }
    csv::write_table(cfg.dump_matrix_path, "# transformation matrix M", rows);
  }
  std::vector<std::pair<std::string, std::string>> rows;
  append_model_rows(*model, rows);
  csv::write_named(resolve_out(cfg, cli_out, "params.csv"), rows);
  return kExitOk;
}

void apply_rate_overrides(ModelParams& model, const std::map<std::string, double>& overrides) {
  const int d = model.lattice.d;
  for (const auto& [name, value] : overrides) {
    bool hit = false;
    for (int i = 0; i < d && !hit; ++i) {
      if (name == "s_x" + std::to_string(i + 1)) {
        model.rates.s_axis[i] = value;
        hit = true;
      } else if (name == "s_2|x" + std::to_string(i + 1) + "^2") {
        model.rates.s2_diag[i] = value;
        hit = true;
      }
    }
    if (model.lattice.family == LatticeFamily::Full) {
      for (int i = 0; i < d && !hit; ++i)
        for (int j = 0; j < d && !hit; ++j) {
          if (j == i) continue;
          if (i < j && name == "s_2|x" + std::to_string(i + 1) + "x" + std::to_string(j + 1)) {
            model.rates.s2_cross[pair_index(d, i, j)] = value;
            hit = true;
          } else if (name == "s_3|x" + std::to_string(i + 1) + "^2x" + std::to_string(j + 1)) {
            model.rates.s3[third_order_index(d, i, j)] = value;
            hit = true;
          } else if (i < j && name == "s_4|x" + std::to_string(i + 1) + "^2x" +
                                          std::to_string(j + 1) + "^2") {
            model.rates.s4[pair_index(d, i, j)] = value;
            hit = true;
          }
        }
    }
    if (!hit) throw ConfigError("config: unknown rate override \"" + name + "\"");
  }
}

int cmd_stability(const RunConfig& cfg, const std::string& cli_out) {
  std::string why;
  auto model = build_model(cfg, &why);
  const std::string out = resolve_out(cfg, cli_out, "stability.csv");
  auto num = [](double v) { return csv::format(v, 17); };

  if (!model) {
    // Report-only: synthesis failed before any scan could run (for the axis
    // closed form this is the omega_0 < 0 rejection).
    csv::write_named(out, {{"feasible", "0"}, {"reason", why}});
    std::cerr << why << "\n";
    return kExitUnstable;
  }
  apply_rate_overrides(*model, cfg.rate_overrides);

  StabilityReport report = check_structure(*model);
  von_neumann_scan(*model, cfg.scan_resolution, report);

  csv::write_named(out, {{"feasible", "1"},
                         {"jw_asymmetry", num(report.jw_asymmetry)},
                         {"jw_eigen_max", num(report.jw_eigen_max)},
                         {"rate_ranges_ok", report.rate_ranges_ok ? "1" : "0"},
                         {"structure_ok", report.structure_ok ? "1" : "0"},
                         {"vn_max_modulus", num(report.vn_max_modulus)},
                         {"vn_simple_roots", report.vn_simple_roots ? "1" : "0"},
                         {"scan_resolution", std::to_string(report.scan_resolution)}});
  return report.scan_stable() ? kExitOk : kExitUnstable;
}

int cmd_region(const RunConfig& cfg, const std::string& cli_out) {
  RegionRaster raster;
  if (cfg.region_kind == "stability") {
    const LatticeSpec spec = build_lattice(cfg.d, LatticeFamily::Full);
    raster = stability_region(cfg.d, cfg.omega_tilde, region_scan_rates(spec), cfg.region_grid,
                              cfg.scan_resolution);
  } else {
    raster = solvability_region(cfg.d, cfg.omega_tilde, cfg.s2_axis, cfg.eta,
                                cfg.discretization().dt, cfg.region_grid);
  }
  std::vector<std::vector<std::string>> rows;
  for (size_t iy = 0; iy < raster.ys.size(); ++iy)
    for (size_t ix = 0; ix < raster.xs.size(); ++ix)
      rows.push_back({csv::format(raster.xs[ix], 17), csv::format(raster.ys[iy], 17),
                      std::to_string(raster.at(int(ix), int(iy)))});
  csv::write_table(resolve_out(cfg, cli_out, "region.csv"), "x,y,verdict", rows);
  return kExitOk;
}

BenchmarkCase build_case(const RunConfig& cfg) {
  if (cfg.case_name == "sine_source") {
    if (cfg.d != 2) throw ConfigError("config: sine_source requires d = 2");
    const auto kappa = cfg.kappa_values();
    return sine_source_case(kappa[0], kappa[1]);
  }
  return gauss_hill_case(cfg.d, cfg.kappa_values(), cfg.gamma0);
}

int cmd_run(const RunConfig& cfg, const std::string& cli_out) {
  std::string why;
  const auto model = build_model(cfg, &why);
  if (!model) {
    std::cerr << why << "\n";
    return kExitInfeasible;
  }
  const BenchmarkCase bc = build_case(cfg);
  const InitScheme scheme = cfg.init_scheme == InitChoice::Equilibrium
                                ? InitScheme::Equilibrium
                                : InitScheme::FourthOrder;
  try {
    const auto result = run_case(bc, *model, scheme, cfg.t_final);
    const auto shape = grid_shape(cfg.d, cfg.dx);
    const auto exact = sample_analytic(bc, shape, cfg.dx, result.steps * model->disc.dt);

    std::string header;
    for (int l = 0; l < cfg.d; ++l) header += "i" + std::to_string(l + 1) + ",";
    header += "phi";
    std::vector<std::vector<std::string>> rows;
    rows.reserve(result.phi.size());
    std::vector<int> coords(cfg.d, 0);
    for (size_t c = 0; c < result.phi.size(); ++c) {
      std::vector<std::string> row;
      for (int l = 0; l < cfg.d; ++l) row.push_back(std::to_string(coords[l]));
      row.push_back(csv::format(result.phi[c], 17));
      rows.push_back(std::move(row));
      int l = cfg.d - 1;
      while (l >= 0 && ++coords[l] == shape[l]) coords[l--] = 0;
    }
    csv::write_table(resolve_out(cfg, cli_out, "field.csv"), header, rows);
    std::cout << "steps," << result.steps << "\n"
              << "l2_error," << csv::format(l2_error(result.phi, exact), 17) << "\n";
    return kExitOk;
  } catch (const DivergenceDetected& e) {
    std::cerr << e.what() << "\n";
    return kExitDiverged;
  }
}

int cmd_converge(const RunConfig& cfg, const std::string& cli_out) {
  if (cfg.dx_list.empty()) throw ConfigError("config: converge requires \"dx_list\"");
  if (!cfg.scaling_ratio)
    throw ConfigError("config: converge requires \"scaling_ratio\" (dt varies with dx)");
  const BenchmarkCase bc = build_case(cfg);

  ModelFactory factory = [&](double dx, double dt) {
    RunConfig level = cfg;
    level.dx = dx;
    level.dt = dt;
    level.scaling_ratio.reset();
    std::string why;
    auto model = build_model(level, &why);
    if (!model) std::cerr << why << "\n";
    return model;
  };

  auto emit = [&](InitScheme scheme, const std::string& path) {
    const auto rows = convergence_study(bc, factory, cfg.dx_list, *cfg.scaling_ratio,
                                        cfg.t_final, scheme);
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows)
      cells.push_back({csv::format(r.dx, 17), csv::format(r.dt, 17),
                       r.diverged ? "n/a" : csv::format(r.l2, 17),
                       r.rate ? csv::format(*r.rate, 17) : ""});
    csv::write_table(path, "dx,dt,l2_error,rate", cells);
  };

  const std::string out = resolve_out(cfg, cli_out, "converge.csv");
  try {
    if (cfg.init_scheme == InitChoice::Both) {
      auto with_suffix = [&](const std::string& suffix) {
        const auto dot = out.rfind('.');
        return dot == std::string::npos ? out + suffix : out.substr(0, dot) + suffix + out.substr(dot);
      };
      emit(InitScheme::Equilibrium, with_suffix("_equilibrium"));
      emit(InitScheme::FourthOrder, with_suffix("_fourth_order"));
    } else {
      emit(cfg.init_scheme == InitChoice::Equilibrium ? InitScheme::Equilibrium
                                                      : InitScheme::FourthOrder,
           out);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourth-order MRT lattice Boltzmann engine for diagonal-anisotropic diffusion"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  int threads = 0;
  app.add_option("--config", config_path, "path to the JSON run configuration")->required();
  app.add_option("--out", out_path, "output CSV path (overrides the config)");
  app.add_option("--threads", threads, "cap the OpenMP worker count");

  auto* params = app.add_subcommand("params", "synthesize relaxation parameters and weights");
  auto* stability = app.add_subcommand("stability", "stability-structure check and von Neumann scan");
  auto* region = app.add_subcommand("region", "stability or solvability region raster");
  auto* run = app.add_subcommand("run", "evolve a benchmark case and dump the field");
  auto* converge = app.add_subcommand("converge", "convergence study over a dx list");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (threads > 0) cfg.threads = threads;
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
    if (params->parsed()) return cmd_params(cfg, out_path);
    if (stability->parsed()) return cmd_stability(cfg, out_path);
    if (region->parsed()) return cmd_region(cfg, out_path);
    if (run->parsed()) return cmd_run(cfg, out_path);
    if (converge->parsed()) return cmd_converge(cfg, out_path);
  } catch (const mrtlb::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
