#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sfode/ode_solver.hpp"

namespace sfode {

// Product density of the random variables.
class Density {
 public:
  // Uniform on the given box.
  static Density uniform(const std::vector<Interval>& box);
  // User density; evaluated at xi in the box.
  static Density custom(std::function<double(std::span<const double>)> rho);

  double operator()(std::span<const double> xi) const;
  bool is_uniform() const noexcept { return uniform_value_ > 0.0; }

 private:
  double uniform_value_ = 0.0;
  std::function<double(std::span<const double>)> rho_;
};

// n-th moment t -> E[u(t, xi)^n] as a 1-D series in phi_t^{-1}(t).
class MomentRep {
 public:
  MomentRep() = default;
  MomentRep(int order, SparseTrigPoly coeffs, PeriodizationMap map, std::uint64_t samples = 0);

  int order() const noexcept { return order_; }
  const SparseTrigPoly& coefficients() const noexcept { return coeffs_; }
  const PeriodizationMap& map() const noexcept { return map_; }
  std::uint64_t samples() const noexcept { return samples_; }

  // Real part of the series; throws DomainError outside [alpha_1, beta_1].
  double evaluate(double t) const;

 private:
  int order_ = 1;
  SparseTrigPoly coeffs_{1};
  PeriodizationMap map_ = PeriodizationMap::tent(0.0, 1.0);
  std::uint64_t samples_ = 0;
};

// w_n(x, y) = u(phi(x), phi_xi(y))^n rho(phi_xi(y)) prod |phi_j'(y_j)|, with
// u read at the folded x and the raw y. For the tent map and odd n the sign
// flips on x > 1/2, which leaves the values on [0, 1/2] unchanged. With the
// solution's own spatial map it also samples whole lattices through
// lattice_evaluate.
BlackBoxFn moment_integrand(const SolutionRep& rep, int n, const Density& density,
                            const PeriodizationMap* spatial = nullptr);

// Sparse FFT of w_n(x, y) = u(phi(x), phi_xi(y))^n rho(phi_xi(y)) prod |phi_j'(y_j)|;
// the terms with zero random frequency, scaled by 2^-d_xi, integrate the
// random variables out. phi is the solution's spatial map unless another
// one is given; a smooth map there avoids the slow decay caused by the
// tent kinks in x.
MomentRep moment(const SolutionRep& rep, int n, const Density& density, const SfftConfig& cfg,
                 const PeriodizationMap* spatial = nullptr);

inline double evaluate_moment(const MomentRep& m, double t) { return m.evaluate(t); }

}  // namespace sfode
