#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sfode/ode_solver.hpp"

namespace sfode {

// Values on the uniform grid eta_k = alpha + k (beta - alpha) / 100.
struct GridFunction {
  static constexpr int kPoints = 101;
  std::vector<double> grid;
  std::vector<double> values;

  static GridFunction zeros(const Interval& spatial);
};

// "eta,value" rows.
void write_csv(std::ostream& os, const GridFunction& g, const char* value_name = "value");

// Formal solution u1 + c1 u2 for one parameter vector by cumulative adaptive
// Gauss-Kronrod quadrature; tol is the relative tolerance per panel.
GridFunction solve_fixed_xi(const OdeProblem& problem, std::span<const double> xi, double tol = 1e-10);

// Parameter vector i of a seeded stream, uniform on the random box.
std::vector<double> draw_xi(const OdeProblem& problem, std::uint64_t seed, std::uint64_t i);

// (1/n_test) sum_i u(eta_k, xi_i)^n.
GridFunction mc_moment(const OdeProblem& problem, int n, int n_test, std::uint64_t seed, unsigned workers = 1,
                       double tol = 1e-10);

}  // namespace sfode
