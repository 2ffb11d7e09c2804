#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrtlb/params.hpp"
#include "mrtlb/stability.hpp"

namespace mrtlb {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ParamsMode { General, IsotropicClosedForm, AxisClosedForm };
enum class InitChoice { Equilibrium, FourthOrder, Both };

/// Parsed run configuration. Numbers may be given as decimals or as exact
/// rationals ("11/45").
struct RunConfig {
  int d = 2;
  LatticeFamily family = LatticeFamily::Full;
  std::vector<double> kappa;      // exactly one of kappa / eps_tilde
  std::vector<double> eps_tilde;
  double eta = 0.0;
  double source_const = 0.0;
  double omega_tilde = 0.0;  // defaulted per d when absent
  double s2_axis = 1.0;
  double dx = 0.0;
  std::optional<double> dt;             // exactly one of dt / scaling_ratio
  std::optional<double> scaling_ratio;  // xi = dt / dx^2
  double t_final = 0.0;
  ParamsMode params_mode = ParamsMode::General;
  InitChoice init_scheme = InitChoice::FourthOrder;
  std::string case_name = "gauss_hill";
  double gamma0 = 0.05;
  int scan_resolution = 0;  // defaulted per d when 0
  std::string region_kind = "stability";
  GridSpec region_grid;
  std::map<std::string, double> rate_overrides;  // by moment name
  std::vector<double> dx_list;
  std::string out_path;
  std::string dump_matrix_path;
  int threads = 0;

  Discretization discretization() const;
  /// eps_tilde derived from kappa (or passed through), using xi.
  std::vector<double> eps_tilde_values() const;
  std::vector<double> kappa_values() const;
};

/// Parses the JSON config file; throws ConfigError on malformed input.
RunConfig load_config(const std::string& path);

/// Applies defaults that depend on other fields (omega_tilde, resolution).
void finalize_defaults(RunConfig& cfg);

}  // namespace mrtlb
