#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfode/periodization.hpp"
#include "sfode/sfft.hpp"
#include "sfode/trig_poly.hpp"

namespace sfode {

// -(a(eta, xi) u'(eta, xi))' = f(eta) on [alpha_1, beta_1] with
// u(alpha_1, xi) = u(beta_1, xi) = 0, xi in the product of random_box.
// a must satisfy 0 < r <= a <= R; positivity is checked at every sample.
struct OdeProblem {
  std::function<double(double)> rhs;
  // Optional closed-form antiderivative of rhs, used by the reference solver.
  std::function<double(double)> rhs_antiderivative;
  std::function<double(double, std::span<const double>)> coefficient;
  Interval spatial{0.0, 1.0};
  std::vector<Interval> random_box;

  int d_xi() const noexcept { return static_cast<int>(random_box.size()); }
  void validate() const;
};

struct SolverMaps {
  PeriodizationMap spatial;
  ProductPeriodization random;

  // Tent on every axis, the default.
  static SolverMaps tent(const OdeProblem& problem);
  static SolverMaps of_kind(const OdeProblem& problem, PeriodizationKind spatial_kind,
                            PeriodizationKind random_kind);
};

// Approximation of F(alpha_1) - F(eta) for F' = f:
//   -a0 x - sum_{k != 0} osc_k (e^{2 pi i k x} - 1),   x = phi^{-1}(eta),
// where osc_k = a_k / (2 pi i k) and a_k are the Fourier coefficients of the
// periodized integrand (f o phi) phi'. Vanishes at eta = alpha_1.
class RhsAntiderivative {
 public:
  RhsAntiderivative() = default;
  RhsAntiderivative(Complex a0_hat, std::vector<Complex> osc, PeriodizationMap map);

  Complex a0_hat() const noexcept { return a0_; }
  int N() const noexcept { return static_cast<int>(osc_.size() / 2); }
  // osc(k) for k in [-N, N]; osc(0) == 0.
  Complex osc(int k) const { return osc_[static_cast<std::size_t>(k + N())]; }
  const PeriodizationMap& map() const noexcept { return map_; }

  Complex evaluate(double eta) const;
  // Value at eta = phi(x) given the folded coordinate x in [0, 1/2].
  Complex at_folded(double x) const;

 private:
  Complex a0_{};
  std::vector<Complex> osc_;
  PeriodizationMap map_ = PeriodizationMap::tent(0.0, 1.0);
};

// Evaluable approximate solution
//   u(t, xi) = u1(t, xi) + c1(xi) u2(t, xi)
// where u1, u2 are first-variable antiderivatives in deperiodized form and
// c1 a sparse polynomial in phi_xi^{-1}(xi).
struct StageSamples {
  std::uint64_t rhs = 0;
  std::uint64_t v1 = 0;
  std::uint64_t v2 = 0;
  std::uint64_t c1 = 0;
};

class SolutionRep {
 public:
  SolutionRep() = default;
  SolutionRep(AntiderivativeRep u1, AntiderivativeRep u2, SparseTrigPoly c1, SolverMaps maps,
              StageSamples samples = {});

  const AntiderivativeRep& u1() const noexcept { return u1_; }
  const AntiderivativeRep& u2() const noexcept { return u2_; }
  const SparseTrigPoly& c1() const noexcept { return c1_; }
  const SolverMaps& maps() const noexcept { return maps_; }
  const StageSamples& samples() const noexcept { return samples_; }
  int d_xi() const noexcept { return static_cast<int>(maps_.random.size()); }

  // Real part of u(t, xi); throws DomainError outside the box.
  double evaluate(double t, std::span<const double> xi) const;
  // Complex value at folded coordinates: x = phi_eta^{-1}(t) in [0, 1/2]
  // and y_j = phi_j^{-1}(xi_j). This is the form the solver samples.
  Complex at_folded(double x, std::span<const double> y) const;
  Complex u1_at_folded(double x, std::span<const double> y) const;
  Complex u2_at_folded(double x, std::span<const double> y) const;
  Complex c1_at_folded(std::span<const double> y) const;

 private:
  AntiderivativeRep u1_, u2_;
  SparseTrigPoly c1_;
  SolverMaps maps_{PeriodizationMap::tent(0.0, 1.0), {}};
  StageSamples samples_;
  FastEvaluator u1_eval_, u2_eval_, c1_eval_;
};

// Dense 2N+1 point approximation of the right hand side's antiderivative.
// For the tent map f o phi is approximated and scaled by the constant
// slope |phi'| = 2 (beta - alpha), avoiding the jump of (f o phi) phi'.
RhsAntiderivative approximate_rhs_antiderivative(const std::function<double(double)>& f,
                                                 const PeriodizationMap& map, int N,
                                                 std::uint64_t* samples = nullptr);

// Sparse FFT of (x, y) -> F(phi(x)) phi'(x) / a(phi(x), phi_xi(y)).
SfftResult approximate_v1(const OdeProblem& problem, const RhsAntiderivative& rhs, const SolverMaps& maps,
                          const SfftConfig& cfg);
// Sparse FFT of (x, y) -> phi'(x) / a(phi(x), phi_xi(y)).
SfftResult approximate_v2(const OdeProblem& problem, const SolverMaps& maps, const SfftConfig& cfg);

// b_(k,l) / (2 pi i k) for k != 0, b_(0,l) for the linear part.
AntiderivativeRep antiderivative_and_deperiodize(const SparseTrigPoly& vhat);

// y -> -u1(1/2, y) / u2(1/2, y), the boundary ratio at x = phi^{-1}(beta_1).
// Samples whole lattices through lattice_evaluate.
BlackBoxFn c1_black_box(const AntiderivativeRep& u1, const AntiderivativeRep& u2);

// Sparse FFT of c1_black_box.
SfftResult approximate_c1(const AntiderivativeRep& u1, const AntiderivativeRep& u2, const SolverMaps& maps,
                          const SfftConfig& cfg);

struct SolveConfig {
  int rhs_N = 64;
  SfftConfig v1;
  SfftConfig v2;
  SfftConfig c1;

  static SolveConfig shared(const SfftConfig& cfg, int rhs_N = 0);
};

// The full pipeline; errors are rethrown as StageError naming the stage.
SolutionRep solve(const OdeProblem& problem, const SolverMaps& maps, const SolveConfig& cfg);

}  // namespace sfode
