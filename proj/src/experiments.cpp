#include "sfode/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <ostream>

#include "sfode/errors.hpp"
#include "sfode/rng.hpp"

namespace sfode {

double riemann_zeta(double s) {
  if (!(s > 1.0)) throw ContractError("riemann_zeta: argument must exceed 1");
  if (s == 2.0) return std::numbers::pi * std::numbers::pi / 6.0;
  // Direct sum up to n plus the Euler-Maclaurin tail.
  constexpr int n = 1000;
  double sum = 0.0;
  for (int k = n - 1; k >= 1; --k) sum += std::pow(k, -s);
  const double nd = n;
  const double tail = std::pow(nd, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(nd, -s) + s / 12.0 * std::pow(nd, -s - 1.0) -
                      s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(nd, -s - 3.0);
  return sum + tail;
}

DiffusionModel::DiffusionModel(double a0, double gamma, int d_xi) : a0_(a0), gamma_(gamma), d_xi_(d_xi) {
  if (!(gamma > 1.0)) throw ContractError("DiffusionModel: gamma must exceed 1");
  if (d_xi < 2 || d_xi % 2 != 0) throw ContractError("DiffusionModel: d_xi must be even and positive");
  zeta_ = riemann_zeta(gamma);
  if (!(a0 > 2.0 * zeta_)) throw ContractError("DiffusionModel: a0 must exceed 2 zeta(gamma)");
  for (int j = 1; j <= d_xi / 2; ++j) decay_.push_back(std::pow(j, -gamma));
}

double DiffusionModel::operator()(double eta, std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != d_xi_) throw ContractError("diffusion_coefficient: wrong number of random variables");
  double a = a0_;
  for (int j = 1; j <= d_xi_ / 2; ++j) {
    const double arg = j * std::numbers::pi * eta;
    a += (xi[2 * j - 2] * std::cos(arg) + xi[2 * j - 1] * std::sin(arg)) * decay_[j - 1];
  }
  return a;
}

OdeProblem make_problem(const DiffusionModel& model) {
  OdeProblem p;
  p.rhs = [](double) { return 10.0; };
  p.rhs_antiderivative = [](double eta) { return 10.0 * eta; };
  p.coefficient = [model](double eta, std::span<const double> xi) { return model(eta, xi); };
  p.spatial = {0.0, 1.0};
  p.random_box.assign(static_cast<std::size_t>(model.d_xi()), Interval{-1.0, 1.0});
  return p;
}

SettingParams setting_params(const std::string& name) {
  if (name == "I") return {32, 1000, 1e-12, 5};
  if (name == "II") return {64, 5000, 1e-12, 5};
  if (name == "III") return {128, 8000, 1e-12, 5};
  throw ContractError("unknown setting '" + name + "' (expected I, II or III)");
}

SfftConfig ExperimentConfig::sfft_config() const {
  const auto p = params();
  SfftConfig c;
  c.N = p.N;
  c.s = p.s;
  c.theta = p.theta;
  c.r = p.r;
  c.backend = backend;
  c.seed = seed;
  c.workers = workers;
  c.progress = progress;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError("config '" + path + "': " + e.what());
  }
  ExperimentConfig cfg;
  cfg.model = DiffusionModel(j.value("a0", 4.3), j.value("gamma", 2.0), j.value("d_xi", 20));
  cfg.setting = j.value("setting", std::string("I"));
  if (j.contains("N") || j.contains("s") || j.contains("theta") || j.contains("r")) {
    auto base = setting_params(cfg.setting);
    cfg.custom = SettingParams{j.value("N", base.N), j.value("s", base.s), j.value("theta", base.theta),
                               j.value("r", base.r)};
  }
  cfg.backend = parse_backend(j.value("backend", std::string("mr1l")));
  cfg.n_test = j.value("n_test", cfg.n_test);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.workers = j.value("workers", cfg.workers);
  if (j.contains("periodization")) {
    const auto& p = j["periodization"];
    cfg.spatial_map = parse_periodization_kind(p.value("spatial", std::string("tent")));
    cfg.random_map = parse_periodization_kind(p.value("random", std::string("tent")));
  }
  return cfg;
}

SolutionRep run_solve(const ExperimentConfig& cfg) {
  const auto problem = make_problem(cfg.model);
  return solve(problem, cfg.maps(problem), SolveConfig::shared(cfg.sfft_config()));
}

double ErrorStudy::grid_mean() const {
  double s = 0.0;
  for (double v : err.values) s += v;
  return s / static_cast<double>(err.values.size());
}

double ErrorStudy::grid_max() const { return *std::max_element(err.values.begin(), err.values.end()); }

ErrorStudy run_error_study(const ExperimentConfig& cfg, const SolutionRep& rep) {
  const auto problem = make_problem(cfg.model);
  if (cfg.n_test < 1) throw ContractError("run_error_study: n_test must be >= 1");
  ErrorStudy study;
  study.samples = rep.samples();
  study.err = GridFunction::zeros(problem.spatial);
  const std::uint64_t draws = derive_seed(cfg.seed, 100);
  for (int i = 0; i < cfg.n_test; ++i) {
    const auto xi = draw_xi(problem, draws, static_cast<std::uint64_t>(i));
    const auto ref = solve_fixed_xi(problem, xi);
    for (int k = 0; k < GridFunction::kPoints; ++k)
      study.err.values[k] += std::abs(ref.values[k] - rep.evaluate(ref.grid[k], xi));
  }
  for (auto& v : study.err.values) v /= cfg.n_test;
  return study;
}

ErrorStudy run_error_study(const ExperimentConfig& cfg) { return run_error_study(cfg, run_solve(cfg)); }

MomentRep run_moment(const ExperimentConfig& cfg, const SolutionRep& rep, int n) {
  auto scfg = cfg.sfft_config();
  scfg.seed = derive_seed(cfg.seed, 300, static_cast<std::uint64_t>(n));
  return moment(rep, n, Density::uniform(make_problem(cfg.model).random_box), scfg);
}

MomentStudy run_moment_study(const ExperimentConfig& cfg, const SolutionRep& rep, int n) {
  const auto problem = make_problem(cfg.model);
  const auto m = run_moment(cfg, rep, n);
  MomentStudy study;
  study.order = n;
  study.samples = m.samples();
  study.reference = mc_moment(problem, n, cfg.n_test, derive_seed(cfg.seed, 200), cfg.workers);
  study.approx = GridFunction::zeros(problem.spatial);
  study.residual = GridFunction::zeros(problem.spatial);
  for (int k = 0; k < GridFunction::kPoints; ++k) {
    study.approx.values[k] = m.evaluate(study.approx.grid[k]);
    study.residual.values[k] = std::abs(study.reference.values[k] - study.approx.values[k]);
  }
  return study;
}

MomentStudy run_moment_study(const ExperimentConfig& cfg, int n) { return run_moment_study(cfg, run_solve(cfg), n); }

ExpansionStudy run_expansion_study(const SolutionRep& rep, double coeff_floor) {
  std::vector<int> out(static_cast<std::size_t>(1 + rep.d_xi()), 0);
  for (const auto* u : {&rep.u1(), &rep.u2()}) {
    const auto osc = u->oscillatory().directional_expansion(coeff_floor);
    const auto lin = u->linear().directional_expansion(coeff_floor);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::max(out[j], osc[j]);
    for (std::size_t j = 0; j < lin.size(); ++j) out[j + 1] = std::max(out[j + 1], lin[j]);
  }
  return {std::move(out)};
}

ExpansionStudy run_expansion_study(const ExperimentConfig& cfg, double coeff_floor) {
  return run_expansion_study(run_solve(cfg), coeff_floor);
}

void write_error_csv(std::ostream& os, const ErrorStudy& study) { write_csv(os, study.err, "err"); }

void write_moment_csv(std::ostream& os, const MomentStudy& study) {
  os << "eta,moment_" << study.order << ",reference,residual\n";
  os.precision(17);
  for (std::size_t k = 0; k < study.approx.grid.size(); ++k)
    os << study.approx.grid[k] << ',' << study.approx.values[k] << ',' << study.reference.values[k] << ','
       << study.residual.values[k] << '\n';
}

void write_expansion_csv(std::ostream& os, const ExpansionStudy& study) {
  os << "dimension,expansion\n";
  for (std::size_t j = 0; j < study.expansion.size(); ++j) os << j << ',' << study.expansion[j] << '\n';
}

void write_moment_curve_csv(std::ostream& os, const MomentRep& m) {
  os << "eta,moment_" << m.order() << '\n';
  os.precision(17);
  const auto g = GridFunction::zeros({m.map().alpha(), m.map().beta()});
  for (double eta : g.grid) os << eta << ',' << m.evaluate(eta) << '\n';
}

std::string samples_json(const ExperimentConfig& cfg, const StageSamples& samples, std::uint64_t extra_samples,
                         const char* extra_name) {
  const auto p = cfg.params();
  nlohmann::json j = {{"setting", cfg.custom ? "custom" : cfg.setting},
                      {"N", p.N},
                      {"s", p.s},
                      {"theta", p.theta},
                      {"r", p.r},
                      {"backend", std::string(to_string(cfg.backend))},
                      {"d_xi", cfg.model.d_xi()},
                      {"seed", cfg.seed},
                      {"samples", {{"rhs", samples.rhs}, {"v1", samples.v1}, {"v2", samples.v2}, {"c1", samples.c1}}}};
  if (extra_name != nullptr) j["samples"][extra_name] = extra_samples;
  return j.dump(2);
}

}  // namespace sfode
