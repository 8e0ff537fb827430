#include "sfode/reference_solver.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "sfode/errors.hpp"
#include "sfode/rng.hpp"

namespace sfode {

namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr unsigned kMaxDepth = 20;

}  // namespace

GridFunction GridFunction::zeros(const Interval& spatial) {
  GridFunction g;
  g.grid.resize(kPoints);
  g.values.assign(kPoints, 0.0);
  for (int k = 0; k < kPoints; ++k) g.grid[k] = spatial.lo + spatial.length() * k / (kPoints - 1);
  g.grid.back() = spatial.hi;
  return g;
}

void write_csv(std::ostream& os, const GridFunction& g, const char* value_name) {
  os << "eta," << value_name << '\n';
  os.precision(17);
  for (std::size_t k = 0; k < g.grid.size(); ++k) os << g.grid[k] << ',' << g.values[k] << '\n';
}

GridFunction solve_fixed_xi(const OdeProblem& problem, std::span<const double> xi, double tol) {
  problem.validate();
  if (static_cast<int>(xi.size()) != problem.d_xi()) throw ContractError("solve_fixed_xi: wrong number of random variables");
  if (!(tol > 0.0)) throw ContractError("solve_fixed_xi: tolerance must be positive");
  const double alpha = problem.spatial.lo;

  auto inv_a = [&](double eta) {
    const double a = problem.coefficient(eta, xi);
    if (!(a > 0.0) || !std::isfinite(a)) throw NumericalError("reference solver: diffusion coefficient not positive");
    return 1.0 / a;
  };
  // F(alpha) - F(eta)
  auto rhs_diff = [&](double eta) {
    if (problem.rhs_antiderivative) return problem.rhs_antiderivative(alpha) - problem.rhs_antiderivative(eta);
    if (eta == alpha) return 0.0;
    return -Quad::integrate(problem.rhs, alpha, eta, kMaxDepth, tol);
  };

  GridFunction u1 = GridFunction::zeros(problem.spatial);
  std::vector<double> u2(GridFunction::kPoints, 0.0);
  for (int k = 1; k < GridFunction::kPoints; ++k) {
    const double lo = u1.grid[k - 1], hi = u1.grid[k];
    u1.values[k] = u1.values[k - 1] +
                   Quad::integrate([&](double s) { return rhs_diff(s) * inv_a(s); }, lo, hi, kMaxDepth, tol);
    u2[k] = u2[k - 1] + Quad::integrate(inv_a, lo, hi, kMaxDepth, tol);
  }
  const double c1 = -u1.values.back() / u2.back();
  for (int k = 0; k < GridFunction::kPoints; ++k) u1.values[k] += c1 * u2[k];
  u1.values.back() = 0.0;
  return u1;
}

std::vector<double> draw_xi(const OdeProblem& problem, std::uint64_t seed, std::uint64_t i) {
  Rng rng(derive_seed(seed, 7, i));
  std::vector<double> xi(problem.random_box.size());
  for (std::size_t j = 0; j < xi.size(); ++j) xi[j] = rng.uniform(problem.random_box[j].lo, problem.random_box[j].hi);
  return xi;
}

GridFunction mc_moment(const OdeProblem& problem, int n, int n_test, std::uint64_t seed, unsigned workers,
                       double tol) {
  if (n < 1) throw ContractError("mc_moment: order must be >= 1");
  if (n_test < 1) throw ContractError("mc_moment: n_test must be >= 1");
  // Per-draw rows, summed afterwards in draw order so the result does not
  // depend on the number of workers.
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n_test));
  auto run = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      auto xi = draw_xi(problem, seed, static_cast<std::uint64_t>(i));
      auto g = solve_fixed_xi(problem, xi, tol);
      for (auto& v : g.values) v = std::pow(v, n);
      rows[i] = std::move(g.values);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_test)));
  if (workers == 1) {
    run(0, n_test);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      const int chunk = (n_test + static_cast<int>(workers) - 1) / static_cast<int>(workers);
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            run(static_cast<int>(w) * chunk, std::min(n_test, static_cast<int>(w + 1) * chunk));
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  GridFunction out = GridFunction::zeros(problem.spatial);
  for (const auto& row : rows)
    for (int k = 0; k < GridFunction::kPoints; ++k) out.values[k] += row[k];
  for (auto& v : out.values) v /= n_test;
  return out;
}

}  // namespace sfode
