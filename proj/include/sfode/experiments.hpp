#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sfode/moments.hpp"
#include "sfode/ode_solver.hpp"
#include "sfode/reference_solver.hpp"

namespace sfode {

double riemann_zeta(double s);

// a(eta, xi) = a0 + sum_{j=1}^{d/2} (xi_{2j-1} cos(j pi eta) + xi_{2j} sin(j pi eta)) / j^gamma
class DiffusionModel {
 public:
  DiffusionModel(double a0 = 4.3, double gamma = 2.0, int d_xi = 20);

  double a0() const noexcept { return a0_; }
  double gamma() const noexcept { return gamma_; }
  int d_xi() const noexcept { return d_xi_; }
  // a0 -+ 2 zeta(gamma)
  double lower_bound() const noexcept { return a0_ - 2.0 * zeta_; }
  double upper_bound() const noexcept { return a0_ + 2.0 * zeta_; }

  double operator()(double eta, std::span<const double> xi) const;

 private:
  double a0_, gamma_;
  int d_xi_;
  double zeta_;
  std::vector<double> decay_;  // j^-gamma
};

inline double diffusion_coefficient(const DiffusionModel& m, double eta, std::span<const double> xi) {
  return m(eta, xi);
}

// -(a u')' = 10 on [0, 1], xi uniform on [-1, 1]^d.
OdeProblem make_problem(const DiffusionModel& model);

struct SettingParams {
  int N;
  std::size_t s;
  double theta;
  int r;
};

// "I", "II", "III"
SettingParams setting_params(const std::string& name);

struct ExperimentConfig {
  DiffusionModel model{};
  std::string setting = "I";
  std::optional<SettingParams> custom;  // overrides setting when set
  SamplingBackend backend = SamplingBackend::multiple_lattice;
  PeriodizationKind spatial_map = PeriodizationKind::tent;
  PeriodizationKind random_map = PeriodizationKind::tent;
  int n_test = 2000;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
  unsigned workers = 1;
  std::ostream* progress = nullptr;

  SettingParams params() const { return custom ? *custom : setting_params(setting); }
  SfftConfig sfft_config() const;
  SolverMaps maps(const OdeProblem& problem) const { return SolverMaps::of_kind(problem, spatial_map, random_map); }
};

// Config JSON with keys "a0", "gamma", "d_xi", "setting", "N", "s", "theta",
// "r", "backend", "n_test", "seed", "output_dir", "workers" and an object
// "periodization" with "spatial" and "random".
ExperimentConfig load_config(const std::string& path);

SolutionRep run_solve(const ExperimentConfig& cfg);

struct ErrorStudy {
  GridFunction err;  // (1/n_test) sum_i |u(eta_k, xi_i) - u_approx(eta_k, xi_i)|
  StageSamples samples;
  double grid_mean() const;
  double grid_max() const;
};

ErrorStudy run_error_study(const ExperimentConfig& cfg, const SolutionRep& rep);
ErrorStudy run_error_study(const ExperimentConfig& cfg);

struct MomentStudy {
  int order = 1;
  GridFunction approx;     // evaluate_moment on the grid
  GridFunction reference;  // Monte-Carlo average of reference solutions
  GridFunction residual;   // |reference - approx|
  std::uint64_t samples = 0;
};

// The n-th moment under the uniform density, seeded from cfg.seed and n.
MomentRep run_moment(const ExperimentConfig& cfg, const SolutionRep& rep, int n);

MomentStudy run_moment_study(const ExperimentConfig& cfg, const SolutionRep& rep, int n);
MomentStudy run_moment_study(const ExperimentConfig& cfg, int n);

struct ExpansionStudy {
  std::vector<int> expansion;  // per coordinate, spatial first
};

// Directional expansion of the frequency set of the solution, the union of
// the supports detected for u1 and u2 (linear terms at spatial frequency
// 0). Needs no further samples.
ExpansionStudy run_expansion_study(const SolutionRep& rep, double coeff_floor = 0.0);
ExpansionStudy run_expansion_study(const ExperimentConfig& cfg, double coeff_floor = 0.0);

void write_error_csv(std::ostream& os, const ErrorStudy& study);
void write_moment_csv(std::ostream& os, const MomentStudy& study);
void write_expansion_csv(std::ostream& os, const ExpansionStudy& study);
// "eta,moment_n"
void write_moment_curve_csv(std::ostream& os, const MomentRep& m);
std::string samples_json(const ExperimentConfig& cfg, const StageSamples& samples,
                         std::uint64_t extra_samples = 0, const char* extra_name = nullptr);

}  // namespace sfode
