#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sfode/errors.hpp"
#include "sfode/experiments.hpp"
#include "sfode/serialization.hpp"

namespace fs = std::filesystem;
using namespace sfode;

namespace {

struct Options {
  std::string config;
  std::string setting;
  std::string backend;
  int dxi = 0;
  int ntest = 0;
  long long seed = -1;
  std::string out = ".";
  bool paper_scale = false;
  bool verbose = false;
  unsigned workers = 0;
  int order = 1;
  double floor = 0.0;
};

ExperimentConfig make_config(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.setting.empty()) {
    cfg.setting = o.setting;
    cfg.custom.reset();
  }
  if (!o.backend.empty()) cfg.backend = parse_backend(o.backend);
  if (o.dxi > 0) cfg.model = DiffusionModel(cfg.model.a0(), cfg.model.gamma(), o.dxi);
  if (o.paper_scale) cfg.n_test = 20000;
  if (o.ntest > 0) cfg.n_test = o.ntest;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.workers > 0) cfg.workers = o.workers;
  if (o.out != "." || o.config.empty()) cfg.output_dir = o.out;
  if (o.verbose) cfg.progress = &std::cerr;
  fs::create_directories(cfg.output_dir);
  return cfg;
}

template <class Writer>
void write_file(const ExperimentConfig& cfg, const std::string& name, Writer&& writer) {
  const auto path = fs::path(cfg.output_dir) / name;
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  writer(os);
}

SolutionRep timed_solve(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  auto rep = run_solve(cfg);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  const auto& s = rep.samples();
  std::cerr << "solve: " << dt.count() << " s, samples v1=" << s.v1 << " v2=" << s.v2 << " c1=" << s.c1 << '\n';
  write_file(cfg, "samples.json", [&](std::ostream& os) { os << samples_json(cfg, s) << '\n'; });
  return rep;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse FFT solver for ODEs with random coefficients"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--setting", o.setting, "Parameter setting")->check(CLI::IsMember({"I", "II", "III"}));
    sub->add_option("--backend", o.backend, "Sampling backend")->check(CLI::IsMember({"r1l", "mr1l"}));
    sub->add_option("--dxi", o.dxi, "Number of random variables (even)");
    sub->add_option("--ntest", o.ntest, "Number of reference draws");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--workers", o.workers, "Sampling threads");
    sub->add_flag("--paper-scale", o.paper_scale, "Use 20000 reference draws");
    sub->add_flag("--verbose", o.verbose, "Print sparse FFT progress");
  };
  auto* solve_cmd = app.add_subcommand("solve", "Solve and write solution.coeffs");
  auto* moment_cmd = app.add_subcommand("moment", "Write the moment curve as moment.csv");
  auto* err_cmd = app.add_subcommand("err-study", "Pointwise error against reference solutions");
  auto* res_cmd = app.add_subcommand("res-study", "First and second moment residuals");
  auto* exp_cmd = app.add_subcommand("expansion", "Directional expansion of the solution's frequency set");
  for (auto* sub : {solve_cmd, moment_cmd, err_cmd, res_cmd, exp_cmd}) common(sub);
  moment_cmd->add_option("--order", o.order, "Moment order")->check(CLI::Range(1, 8));
  exp_cmd->add_option("--floor", o.floor, "Coefficient magnitude floor");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = make_config(o);
    const auto rep = timed_solve(cfg);
    if (solve_cmd->parsed()) {
      write_file(cfg, "solution.coeffs", [&](std::ostream& os) { write_solution(os, rep); });
    } else if (moment_cmd->parsed()) {
      const auto m = run_moment(cfg, rep, o.order);
      write_file(cfg, "moment.csv", [&](std::ostream& os) { write_moment_curve_csv(os, m); });
      write_file(cfg, "samples.json", [&](std::ostream& os) { os << samples_json(cfg, rep.samples(), m.samples(), "moment") << '\n'; });
    } else if (err_cmd->parsed()) {
      const auto study = run_error_study(cfg, rep);
      write_file(cfg, "err.csv", [&](std::ostream& os) { write_error_csv(os, study); });
      std::cerr << "err: grid mean " << study.grid_mean() << ", max " << study.grid_max() << '\n';
    } else if (res_cmd->parsed()) {
      for (int n : {1, 2}) {
        const auto study = run_moment_study(cfg, rep, n);
        write_file(cfg, "res" + std::to_string(n) + ".csv", [&](std::ostream& os) { write_moment_csv(os, study); });
        std::cerr << "res" << n << ": value at 0.5 " << study.approx.values[50] << ", reference "
                  << study.reference.values[50] << '\n';
      }
    } else if (exp_cmd->parsed()) {
      const auto study = run_expansion_study(rep, o.floor);
      write_file(cfg, "expansion.csv", [&](std::ostream& os) { write_expansion_csv(os, study); });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
