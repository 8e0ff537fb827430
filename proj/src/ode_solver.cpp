#include "sfode/ode_solver.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "sfode/errors.hpp"
#include "sfode/fft.hpp"
#include "sfode/rng.hpp"

namespace sfode {

void OdeProblem::validate() const {
  if (!rhs) throw ContractError("OdeProblem: missing right hand side");
  if (!coefficient) throw ContractError("OdeProblem: missing diffusion coefficient");
  if (!(spatial.hi > spatial.lo)) throw ContractError("OdeProblem: empty spatial interval");
  for (const auto& box : random_box)
    if (!(box.hi > box.lo)) throw ContractError("OdeProblem: empty random interval");
}

SolverMaps SolverMaps::tent(const OdeProblem& problem) {
  return of_kind(problem, PeriodizationKind::tent, PeriodizationKind::tent);
}

SolverMaps SolverMaps::of_kind(const OdeProblem& problem, PeriodizationKind spatial_kind,
                               PeriodizationKind random_kind) {
  return {PeriodizationMap(spatial_kind, problem.spatial.lo, problem.spatial.hi),
          ProductPeriodization::uniform(random_kind, problem.random_box)};
}

RhsAntiderivative::RhsAntiderivative(Complex a0_hat, std::vector<Complex> osc, PeriodizationMap map)
    : a0_(a0_hat), osc_(std::move(osc)), map_(map) {
  if (osc_.size() % 2 != 1) throw ContractError("RhsAntiderivative: coefficient vector must have odd length");
}

Complex RhsAntiderivative::evaluate(double eta) const {
  if (eta < map_.alpha() || eta > map_.beta()) throw DomainError("RhsAntiderivative: eta outside the interval");
  return at_folded(map_.inverse(eta));
}

Complex RhsAntiderivative::at_folded(double x) const {
  const int n = N();
  Complex sum = -a0_ * x;
  const Complex e = unit_phase(x);
  Complex ep = 1.0;
  for (int k = 1; k <= n; ++k) {
    ep *= e;
    if (k % 32 == 0) ep = unit_phase(k * x);
    sum -= osc(k) * (ep - 1.0) + osc(-k) * (std::conj(ep) - 1.0);
  }
  return sum;
}

RhsAntiderivative approximate_rhs_antiderivative(const std::function<double(double)>& f,
                                                 const PeriodizationMap& map, int N, std::uint64_t* samples) {
  if (N < 1) throw ContractError("approximate_rhs_antiderivative: N must be >= 1");
  const int L = 2 * N + 1;
  const bool tent = map.kind() == PeriodizationKind::tent;
  std::vector<Complex> buf(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j) {
    const double x = static_cast<double>(j) / L;
    const double scale = tent ? map.tent_slope() : map.derivative(x);
    buf[j] = f(map.forward(x)) * scale;
  }
  if (samples != nullptr) *samples += static_cast<std::uint64_t>(L);
  dft_forward(buf);
  std::vector<Complex> osc(static_cast<std::size_t>(L));
  for (int k = -N; k <= N; ++k) {
    if (k == 0) continue;
    const Complex ak = buf[((k % L) + L) % L] / static_cast<double>(L);
    osc[k + N] = ak / Complex(0.0, kTwoPi * k);
  }
  return {buf[0] / static_cast<double>(L), std::move(osc), map};
}

namespace {

double checked_coefficient(const OdeProblem& problem, double eta, std::span<const double> xi) {
  const double a = problem.coefficient(eta, xi);
  if (!(a > 0.0) || !std::isfinite(a))
    throw NumericalError("diffusion coefficient not positive at a sample point (a = " + std::to_string(a) +
                         ", eta = " + std::to_string(eta) + ")");
  return a;
}

// (x, y) -> weight(x) / a(phi(x), phi_xi(y)) with the tent slope in place of
// phi' for the tent map.
BlackBoxFn integrand(const OdeProblem& problem, const SolverMaps& maps,
                     std::function<Complex(double)> numerator) {
  BlackBoxFn fn;
  fn.dim = 1 + problem.d_xi();
  fn.thread_safe = true;
  fn.eval = [&problem, &maps, numerator = std::move(numerator)](std::span<const double> p) {
    thread_local std::vector<double> xi;
    xi.resize(p.size() - 1);
    const double x = PeriodizationMap::fold(p[0]);
    for (std::size_t j = 0; j < xi.size(); ++j) xi[j] = maps.random[j].forward(p[j + 1]);
    const auto& m = maps.spatial;
    const double slope = m.kind() == PeriodizationKind::tent ? m.tent_slope() : m.derivative(p[0]);
    const double eta = m.forward(x);
    return numerator(x) * slope / checked_coefficient(problem, eta, xi);
  };
  return fn;
}

void check_dims(const OdeProblem& problem, const SolverMaps& maps) {
  if (static_cast<int>(maps.random.size()) != problem.d_xi())
    throw ContractError("solver maps do not match the number of random variables");
}

}  // namespace

SfftResult approximate_v1(const OdeProblem& problem, const RhsAntiderivative& rhs, const SolverMaps& maps,
                          const SfftConfig& cfg) {
  check_dims(problem, maps);
  if (rhs.map().kind() != maps.spatial.kind() || rhs.map().alpha() != maps.spatial.alpha() ||
      rhs.map().beta() != maps.spatial.beta())
    throw ContractError("approximate_v1: antiderivative built with a different spatial map");
  return sfft(integrand(problem, maps, [&rhs](double x) { return rhs.at_folded(x); }), cfg);
}

SfftResult approximate_v2(const OdeProblem& problem, const SolverMaps& maps, const SfftConfig& cfg) {
  check_dims(problem, maps);
  return sfft(integrand(problem, maps, [](double) { return Complex(1.0); }), cfg);
}

AntiderivativeRep antiderivative_and_deperiodize(const SparseTrigPoly& vhat) {
  if (vhat.dim() < 1) throw ContractError("antiderivative_and_deperiodize: dimension must be >= 1");
  return vhat.antiderivative_first_var();
}

BlackBoxFn c1_black_box(const AntiderivativeRep& u1, const AntiderivativeRep& u2) {
  if (u1.dim() != u2.dim() || u1.dim() < 2) throw ContractError("c1_black_box: dimension mismatch");
  auto q1 = std::make_shared<const SparseTrigPoly>(u1.at_first(0.5));
  auto q2 = std::make_shared<const SparseTrigPoly>(u2.at_first(0.5));
  auto e1 = std::make_shared<const FastEvaluator>(*q1);
  auto e2 = std::make_shared<const FastEvaluator>(*q2);
  auto ratio = [](Complex num, Complex den) {
    if (std::abs(den) < 1e-14) throw NumericalError("approximate_c1: u2 at the right boundary vanishes");
    return -num / den;
  };
  BlackBoxFn fn;
  fn.dim = u1.dim() - 1;
  fn.thread_safe = true;
  fn.eval = [e1, e2, ratio](std::span<const double> y) { return ratio((*e1)(y), (*e2)(y)); };
  fn.on_lattice = [q1, q2, ratio](const Rank1Lattice& lat, std::span<const double> anchor, std::vector<Complex>& out) {
    out = lattice_evaluate(q1->fix_trailing(anchor), lat);
    const auto den = lattice_evaluate(q2->fix_trailing(anchor), lat);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ratio(out[i], den[i]);
  };
  return fn;
}

SfftResult approximate_c1(const AntiderivativeRep& u1, const AntiderivativeRep& u2, const SolverMaps& maps,
                          const SfftConfig& cfg) {
  const int d = static_cast<int>(maps.random.size());
  if (d == 0) throw ContractError("approximate_c1: needs at least one random variable");
  if (u1.dim() != 1 + d || u2.dim() != 1 + d) throw ContractError("approximate_c1: dimension mismatch");
  return sfft(c1_black_box(u1, u2), cfg);
}

SolveConfig SolveConfig::shared(const SfftConfig& cfg, int rhs_N) {
  SolveConfig out;
  out.rhs_N = rhs_N > 0 ? rhs_N : cfg.N;
  out.v1 = out.v2 = out.c1 = cfg;
  out.v2.seed = derive_seed(cfg.seed, 11);
  out.c1.seed = derive_seed(cfg.seed, 12);
  return out;
}

namespace {

template <class F>
auto run_stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

SolutionRep solve(const OdeProblem& problem, const SolverMaps& maps, const SolveConfig& cfg) {
  problem.validate();
  check_dims(problem, maps);
  if (problem.d_xi() < 1) throw ContractError("solve: needs at least one random variable");
  StageSamples counts;
  auto rhs = run_stage("rhs", [&] {
    return approximate_rhs_antiderivative(problem.rhs, maps.spatial, cfg.rhs_N, &counts.rhs);
  });
  auto v1 = run_stage("v1", [&] { return approximate_v1(problem, rhs, maps, cfg.v1); });
  counts.v1 = v1.samples;
  auto v2 = run_stage("v2", [&] { return approximate_v2(problem, maps, cfg.v2); });
  counts.v2 = v2.samples;
  auto u1 = run_stage("deperiodize", [&] { return antiderivative_and_deperiodize(v1.poly); });
  auto u2 = run_stage("deperiodize", [&] { return antiderivative_and_deperiodize(v2.poly); });
  auto c1 = run_stage("c1", [&] { return approximate_c1(u1, u2, maps, cfg.c1); });
  counts.c1 = c1.samples;
  return {std::move(u1), std::move(u2), std::move(c1.poly), maps, counts};
}

SolutionRep::SolutionRep(AntiderivativeRep u1, AntiderivativeRep u2, SparseTrigPoly c1, SolverMaps maps,
                         StageSamples samples)
    : u1_(std::move(u1)), u2_(std::move(u2)), c1_(std::move(c1)), maps_(std::move(maps)), samples_(samples) {
  const int d = static_cast<int>(maps_.random.size());
  if (u1_.dim() != 1 + d || u2_.dim() != 1 + d || c1_.dim() != d)
    throw ContractError("SolutionRep: coefficient families do not match the maps");
  u1_eval_ = FastEvaluator(u1_);
  u2_eval_ = FastEvaluator(u2_);
  c1_eval_ = FastEvaluator(c1_);
}

Complex SolutionRep::u1_at_folded(double x, std::span<const double> y) const {
  thread_local std::vector<double> p;
  p.assign(1, x);
  p.insert(p.end(), y.begin(), y.end());
  return u1_eval_(p);
}

Complex SolutionRep::u2_at_folded(double x, std::span<const double> y) const {
  thread_local std::vector<double> p;
  p.assign(1, x);
  p.insert(p.end(), y.begin(), y.end());
  return u2_eval_(p);
}

Complex SolutionRep::c1_at_folded(std::span<const double> y) const { return c1_eval_(y); }

Complex SolutionRep::at_folded(double x, std::span<const double> y) const {
  return u1_at_folded(x, y) + c1_at_folded(y) * u2_at_folded(x, y);
}

double SolutionRep::evaluate(double t, std::span<const double> xi) const {
  const auto& m = maps_.spatial;
  if (!(t >= m.alpha() && t <= m.beta())) throw DomainError("evaluate_solution: t outside the spatial interval");
  if (static_cast<int>(xi.size()) != d_xi()) throw ContractError("evaluate_solution: wrong number of random variables");
  thread_local std::vector<double> y;
  y.resize(xi.size());
  for (std::size_t j = 0; j < xi.size(); ++j) {
    const auto& mj = maps_.random[j];
    if (!(xi[j] >= mj.alpha() && xi[j] <= mj.beta()))
      throw DomainError("evaluate_solution: xi outside the random box");
    y[j] = mj.inverse(xi[j]);
  }
  return at_folded(m.inverse(t), y).real();
}

}  // namespace sfode
